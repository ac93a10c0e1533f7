#include "epiflow/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace epiflow {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, const std::vector<double>& step,
                             const std::vector<double>& lo, const std::vector<double>& hi,
                             int max_iters, double ftol) {
    const std::size_t n = x0.size();
    auto clamp = [&](std::vector<double> x) {
        for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
        return x;
    };

    std::vector<std::vector<double>> simplex;
    simplex.push_back(clamp(x0));
    for (std::size_t i = 0; i < n; ++i) {
        auto v = x0;
        v[i] += step[i];
        simplex.push_back(clamp(std::move(v)));
    }
    std::vector<double> fv(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) fv[i] = f(simplex[i]);

    NelderMeadResult res;
    int it = 0;
    for (; it < max_iters; ++it) {
        std::vector<std::size_t> order(simplex.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });

        const std::size_t best = order.front(), worst = order.back(),
                          second_worst = order[order.size() - 2];
        if (std::fabs(fv[worst] - fv[best]) <=
            ftol * (std::fabs(fv[best]) + std::fabs(fv[worst]) + 1e-300)) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k : order)
            if (k != worst)
                for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i];
        for (double& c : centroid) c /= static_cast<double>(simplex.size() - 1);

        auto blend = [&](double coeff) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = centroid[i] + coeff * (simplex[worst][i] - centroid[i]);
            return clamp(std::move(x));
        };

        const auto reflected = blend(-1.0);
        const double fr = f(reflected);
        if (fr < fv[best]) {
            const auto expanded = blend(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                fv[worst] = fe;
            } else {
                simplex[worst] = reflected;
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            simplex[worst] = reflected;
            fv[worst] = fr;
        } else {
            const auto contracted = blend(0.5);
            const double fc = f(contracted);
            if (fc < fv[worst]) {
                simplex[worst] = contracted;
                fv[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t k = 0; k < simplex.size(); ++k) {
                    if (k == best) continue;
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[k][i] = simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
                    fv[k] = f(simplex[k]);
                }
            }
        }
    }

    std::size_t arg = 0;
    for (std::size_t i = 1; i < simplex.size(); ++i)
        if (fv[i] < fv[arg]) arg = i;
    res.x = simplex[arg];
    res.fx = fv[arg];
    res.iterations = it;
    return res;
}

}  // namespace epiflow
