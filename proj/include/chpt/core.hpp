#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace chpt {

// Parameters of the single change-in-mean sequence model:
//   X_i = theta * 1(i <= tau) + eps * xi_i,  i = 1..n,  xi_i iid N(0,1).
struct ModelParams {
    double theta = 0.0;
    int tau = 1;
    double eps = 1.0;
    int n = 2;

    double snr() const { return theta / eps; }

    // eps == 0 is accepted so that noiseless sequences can be generated;
    // every estimator rejects it.
    void validate() const {
        if (n < 2) throw std::invalid_argument("ModelParams: n must be >= 2");
        if (tau < 1 || tau > n) throw std::invalid_argument("ModelParams: tau must lie in 1..n");
        if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("ModelParams: eps must be finite and >= 0");
        if (!std::isfinite(theta)) throw std::invalid_argument("ModelParams: theta must be finite");
    }
};

struct SequenceSample {
    std::vector<double> x;
    ModelParams params;
    std::uint64_t seed = 0;
    std::uint64_t replication_index = 0;
};

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);
double compensated_mean(std::span<const double> values);

// A Monte Carlo mean together with its batch-means standard error. se is NaN
// when fewer than two batches are available.
struct MeanSe {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr std::size_t kDefaultBatches = 100;

// Splits values (in index order) into min(max_batches, size) contiguous
// batches of near-equal size and returns the per-batch means.
std::vector<double> batch_means(std::span<const double> values,
                                std::size_t max_batches = kDefaultBatches);

MeanSe mean_with_batch_se(std::span<const double> values,
                          std::size_t max_batches = kDefaultBatches);

// Ratio of means mean(num)/mean(den) over paired samples, with a delta-method
// standard error computed from the paired batch means.
MeanSe ratio_with_batch_se(std::span<const double> num, std::span<const double> den,
                           std::size_t max_batches = kDefaultBatches);

// Partitions [0, count) into contiguous chunks and runs body(begin, end) for
// each chunk on up to `workers` threads. Callers write results into per-index
// slots so the outcome does not depend on scheduling. workers == 0 means
// hardware concurrency.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t, std::size_t)>& body);

unsigned resolve_workers(unsigned requested);

}  // namespace chpt
