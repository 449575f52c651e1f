#include "chpt/core.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

namespace chpt {

double compensated_sum(std::span<const double> values) {
    CompensatedSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

double compensated_mean(std::span<const double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    return compensated_sum(values) / static_cast<double>(values.size());
}

std::vector<double> batch_means(std::span<const double> values, std::size_t max_batches) {
    const std::size_t size = values.size();
    const std::size_t nb = std::min(max_batches, size);
    std::vector<double> out;
    out.reserve(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t lo = b * size / nb;
        const std::size_t hi = (b + 1) * size / nb;
        out.push_back(compensated_mean(values.subspan(lo, hi - lo)));
    }
    return out;
}

namespace {

double sample_sd(std::span<const double> v) {
    const double m = compensated_mean(v);
    CompensatedSum acc;
    for (double x : v) acc.add((x - m) * (x - m));
    return std::sqrt(acc.value() / static_cast<double>(v.size() - 1));
}

}  // namespace

MeanSe mean_with_batch_se(std::span<const double> values, std::size_t max_batches) {
    MeanSe out;
    if (values.empty()) return out;
    out.mean = compensated_mean(values);
    const auto bm = batch_means(values, max_batches);
    if (bm.size() >= 2) out.se = sample_sd(bm) / std::sqrt(static_cast<double>(bm.size()));
    return out;
}

MeanSe ratio_with_batch_se(std::span<const double> num, std::span<const double> den,
                           std::size_t max_batches) {
    if (num.size() != den.size())
        throw std::invalid_argument("ratio_with_batch_se: paired inputs differ in length");
    MeanSe out;
    if (num.empty()) return out;
    const double dbar = compensated_mean(den);
    out.mean = compensated_mean(num) / dbar;
    const auto bn = batch_means(num, max_batches);
    const auto bd = batch_means(den, max_batches);
    if (bn.size() >= 2) {
        std::vector<double> resid(bn.size());
        for (std::size_t b = 0; b < bn.size(); ++b) resid[b] = bn[b] - out.mean * bd[b];
        out.se = sample_sd(resid) / (std::sqrt(static_cast<double>(bn.size())) * std::abs(dbar));
    }
    return out;
}

unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t nw = std::min<std::size_t>(resolve_workers(workers), count);
    if (nw == 1) {
        body(0, count);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(nw);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < nw; ++w) {
        const std::size_t lo = w * count / nw;
        const std::size_t hi = (w + 1) * count / nw;
        pool.emplace_back([&, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace chpt
