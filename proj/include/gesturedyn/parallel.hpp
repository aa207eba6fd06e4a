#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace gesturedyn {

namespace detail {

template <class Body>
void run_pool(std::size_t n, std::size_t jobs, Body&& body) {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// out[i] = fn(i) for i < n on up to `jobs` threads. Results are placed by
/// index, so output order never depends on scheduling.
template <class Fn>
auto parallel_map(std::size_t n, std::size_t jobs, Fn&& fn) {
    using Result = decltype(fn(std::size_t{0}));
    std::vector<std::optional<Result>> slots(n);
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) slots[i].emplace(fn(i));
    } else {
        detail::run_pool(n, jobs, [&](std::size_t i) { slots[i].emplace(fn(i)); });
    }
    std::vector<Result> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace gesturedyn
