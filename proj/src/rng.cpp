#include "chpt/rng.hpp"

namespace chpt {

std::vector<double> gaussian_draws(RngStream rng, std::size_t count) {
    std::vector<double> out(count);
    NormalSampler draw(rng);
    for (auto& v : out) v = draw();
    return out;
}

}  // namespace chpt
