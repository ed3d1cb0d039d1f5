#include <cmath>
#include <string>

#include "chaoskit/errors.hpp"
#include "chaoskit/model.hpp"

namespace chaoskit {

namespace {

inline double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

inline double sign(double v) { return (v > 0.0) - (v < 0.0); }

void gaussian_initial(NormalStream& stream, std::span<double> out) {
    for (double& v : out) v = stream.next();
}

void cubic_drift(std::span<const double> x, std::span<double> out) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] - x[k] * x[k] * x[k];
}

void quintic_drift(std::span<const double> x, std::span<double> out) {
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double sq = x[k] * x[k];
        out[k] = x[k] - sq * sq * x[k];
    }
}

// Scalar model: a(x) = x - x^3, A = logistic, kappa(x,y) = atan(x+y),
// B = sin, zeta(x,y) = sqrt(x^2 + y^2).
ModelSpec make_example1() {
    ModelSpec model;
    model.state_dim = 1;
    model.noise_dim = 1;
    model.drift = cubic_drift;
    model.initial_sampler = gaussian_initial;
    SingleKernel form;
    form.outer_drift = [](std::span<const double> u, std::span<double> out) {
        out[0] = logistic(u[0]);
    };
    form.kernel_drift = [](std::span<const double> x, std::span<const double> y,
                           std::span<double> out) { out[0] = std::atan(x[0] + y[0]); };
    form.outer_diff = [](std::span<const double> v, std::span<double> out) {
        out[0] = std::sin(v[0]);
    };
    form.kernel_diff = [](std::span<const double> x, std::span<const double> y,
                          std::span<double> out) {
        out[0] = std::sqrt(x[0] * x[0] + y[0] * y[0]);
    };
    model.interaction = std::move(form);
    model.assumption_meta = AssumptionMeta{3.0, 2.0, {1.0, 1.0}};
    return model;
}

// d-dimensional model with a(x) = x - x^3 componentwise, d-dim noise,
// kappa_k = sign(x_k)|x_k + y_k|, A = sin elementwise, and a d x d zeta with
// sqrt(x_k^2 + y_k^2) on the diagonal and x_c elsewhere, B = cos elementwise.
ModelSpec make_example2(int d) {
    ModelSpec model;
    model.state_dim = d;
    model.noise_dim = d;
    model.drift = cubic_drift;
    model.initial_sampler = gaussian_initial;
    SingleKernel form;
    form.outer_drift = [](std::span<const double> u, std::span<double> out) {
        for (std::size_t k = 0; k < u.size(); ++k) out[k] = std::sin(u[k]);
    };
    form.kernel_drift = [](std::span<const double> x, std::span<const double> y,
                           std::span<double> out) {
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = sign(x[k]) * std::fabs(x[k] + y[k]);
    };
    form.outer_diff = [](std::span<const double> v, std::span<double> out) {
        for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::cos(v[k]);
    };
    form.kernel_diff = [d](std::span<const double> x, std::span<const double> y,
                           std::span<double> out) {
        for (int r = 0; r < d; ++r) {
            double* row = out.data() + static_cast<std::size_t>(r) * d;
            for (int c = 0; c < d; ++c) row[c] = x[c];
            row[r] = std::sqrt(x[r] * x[r] + y[r] * y[r]);
        }
    };
    model.interaction = std::move(form);
    return model;
}

// d-dimensional two-kernel model: a(x) = x - x^5 componentwise,
// kappa_1 = atan(x+y), kappa_2 = atan(x-y), drift outer logistic(u1 - u2);
// zeta_1/zeta_2 carry |x_k +- y_k| diagonals with x_c off-diagonal, combined
// by sqrt(V1^2 + V2^2) elementwise.
ModelSpec make_example3(int d) {
    ModelSpec model;
    model.state_dim = d;
    model.noise_dim = d;
    model.drift = quintic_drift;
    model.initial_sampler = gaussian_initial;
    MultiKernel form;
    form.arity = 2;
    form.kernels_drift.push_back([](std::span<const double> x, std::span<const double> y,
                                    std::span<double> out) {
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::atan(x[k] + y[k]);
    });
    form.kernels_drift.push_back([](std::span<const double> x, std::span<const double> y,
                                    std::span<double> out) {
        for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::atan(x[k] - y[k]);
    });
    form.outer_drift = [d](std::span<const double> stacked, std::span<double> out) {
        const double* u1 = stacked.data();
        const double* u2 = stacked.data() + d;
        for (int k = 0; k < d; ++k) out[k] = logistic(u1[k] - u2[k]);
    };
    auto zeta = [d](double diag_sign) {
        return [d, diag_sign](std::span<const double> x, std::span<const double> y,
                              std::span<double> out) {
            for (int r = 0; r < d; ++r) {
                double* row = out.data() + static_cast<std::size_t>(r) * d;
                for (int c = 0; c < d; ++c) row[c] = x[c];
                row[r] = std::fabs(x[r] + diag_sign * y[r]);
            }
        };
    };
    form.kernels_diff.push_back(zeta(+1.0));
    form.kernels_diff.push_back(zeta(-1.0));
    form.outer_diff = [d](std::span<const double> stacked, std::span<double> out) {
        const std::size_t block = static_cast<std::size_t>(d) * d;
        const double* v1 = stacked.data();
        const double* v2 = stacked.data() + block;
        for (std::size_t e = 0; e < block; ++e) out[e] = std::sqrt(v1[e] * v1[e] + v2[e] * v2[e]);
    };
    model.interaction = std::move(form);
    return model;
}

// Scalar second-order interaction: a(x) = x - x^5, A = tanh over the mean of
// |x + y1 + y2|, B = logistic over the mean of (x + y1)/sqrt(1 + x^2 + y1^2
// + y2^2).
ModelSpec make_example4() {
    ModelSpec model;
    model.state_dim = 1;
    model.noise_dim = 1;
    model.drift = quintic_drift;
    model.initial_sampler = gaussian_initial;
    HigherOrder form;
    form.arity = 2;
    form.outer_drift = [](std::span<const double> u, std::span<double> out) {
        out[0] = std::tanh(u[0]);
    };
    form.kernel_drift = [](std::span<const double> x,
                           std::span<const std::span<const double>> ys, std::span<double> out) {
        out[0] = std::fabs(x[0] + ys[0][0] + ys[1][0]);
    };
    form.outer_diff = [](std::span<const double> v, std::span<double> out) {
        out[0] = logistic(v[0]);
    };
    form.kernel_diff = [](std::span<const double> x, std::span<const std::span<const double>> ys,
                          std::span<double> out) {
        const double y1 = ys[0][0];
        const double y2 = ys[1][0];
        out[0] = (x[0] + y1) / std::sqrt(1.0 + x[0] * x[0] + y1 * y1 + y2 * y2);
    };
    model.interaction = std::move(form);
    return model;
}

}  // namespace

ModelSpec build_scenario(const std::string& name, int state_dim) {
    if (state_dim < 1) throw InvalidInputError("scenario dimension must be >= 1");
    if (name == "example1" || name == "example4") {
        if (state_dim != 1) {
            throw InvalidInputError("scenario '" + name + "' is scalar; d must be 1");
        }
        return name == "example1" ? make_example1() : make_example4();
    }
    if (name == "example2") return make_example2(state_dim);
    if (name == "example3") return make_example3(state_dim);
    throw InvalidInputError("unknown scenario '" + name + "'");
}

const std::vector<ScenarioInfo>& scenario_catalog() {
    static const std::vector<ScenarioInfo> catalog = {
        {"example1", "d = 1",
         "scalar: a(x)=x-x^3, drift term logistic(mean atan(x+y)), "
         "diffusion sin(mean sqrt(x^2+y^2))"},
        {"example2", "any d",
         "componentwise a(x)=x-x^3, drift sin(mean sign(x_k)|x_k+y_k|), matrix diffusion "
         "cos of mean [diag sqrt(x_k^2+y_k^2), off-diag x_c]"},
        {"example3", "any d",
         "componentwise a(x)=x-x^5, two kernels atan(x+y)/atan(x-y) combined by "
         "logistic(u1-u2), diffusion sqrt(V1^2+V2^2) of two |x_k -+ y_k| matrices"},
        {"example4", "d = 1",
         "scalar pair interaction: a(x)=x-x^5, drift tanh(mean |x+y1+y2|), diffusion "
         "logistic(mean (x+y1)/sqrt(1+x^2+y1^2+y2^2))"},
    };
    return catalog;
}

}  // namespace chaoskit
