#pragma once

#include <cstdint>
#include <random>

#include "qres/operators.hpp"

namespace qres {

/// Deterministic random source. std::mt19937_64 output is pinned by the
/// standard; the gaussian transform is done here by hand because
/// std::normal_distribution is implementation-defined and would break
/// cross-compiler reproducibility of seeded golden values.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    double uniform() {
        // 53-bit mantissa uniform in [0, 1)
        return (gen_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<uint64_t>(n)); }

    uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

Matrix random_ginibre(Rng& rng, int rows, int cols);
Matrix random_hermitian(Rng& rng, int n);      // GUE-like, entries O(1)
Matrix random_unitary(Rng& rng, int n);        // Haar via QR phase fix
Matrix random_state(Rng& rng, int n, int rank = 0); // Wishart density operator
std::vector<Matrix> random_povm(Rng& rng, int n, int outcomes);
Matrix random_pure_state(Rng& rng, int n);

} // namespace qres
