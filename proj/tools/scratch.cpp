#include <iostream>
#include "qres/theorems.hpp"
using namespace qres;
int main() {
    RobustnessSettings cfg;
    Rng rng(11);
    auto ins = default_tomographic_inputs(2);
    const int L = 3;
    std::vector<double> q{0.5, 0.3, 0.2};
    std::vector<std::vector<Matrix>> ha(2, std::vector<Matrix>(L)), hb(2, std::vector<Matrix>(L));
    for (int l = 0; l < L; ++l) {
        auto pa = random_povm(rng, 2, 2), pb = random_povm(rng, 2, 2);
        for (int o = 0; o < 2; ++o) { ha[o][l] = pa[o]; hb[o][l] = pb[o]; }
    }
    Behaviour free_b;
    free_b.inputs_a = ins;
    free_b.inputs_b = ins;
    free_b.table.assign(6, std::vector<std::vector<std::vector<double>>>(6,
        std::vector<std::vector<double>>(2, std::vector<double>(2, 0.0))));
    for (int x = 0; x < 6; ++x) for (int y = 0; y < 6; ++y)
        for (int a = 0; a < 2; ++a) for (int b = 0; b < 2; ++b) {
            double v = 0;
            for (int l = 0; l < L; ++l)
                v += q[l] * (ha[a][l] * ins.states[x].matrix()).trace().real()
                          * (hb[b][l] * ins.states[y].matrix()).trace().real();
            free_b.table[x][y][a][b] = v;
        }
    for (int restarts : {3, 10, 25}) {
        cfg.seesaw_restarts = restarts;
        cfg.lambda_cardinality = 6;
        cfg.seesaw_max_rounds = 40;
        auto rq = rob_behaviour(free_b, cfg);
        std::cout << "restarts=" << restarts << " -> " << rq.value << std::endl;
    }
    return 0;
}
