#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracwave/spectral.hpp"

namespace fracwave {

// Nonlinearity coefficient kappa(x,t): closed-form presets with analytic time
// derivatives, a space-time grid representation (time derivatives by
// differences), or a coefficient expansion in the first few Dirichlet modes
// times Legendre polynomials in t.
class KappaField {
public:
    struct Sample {
        std::vector<double> value;  // (n_steps+1) x nodes, snapshot-major grid values
        std::vector<double> dt;
        std::vector<double> dtt;
        double max_abs = 0.0;
    };

    KappaField() = default;  // identically zero

    static KappaField constant(double value);
    // amplitude * sin(mode * pi * x / L1)  (times sin(pi y / L2) in 2D)
    static KappaField sine_space(double amplitude, int mode = 1);
    static KappaField gaussian_space(double amplitude, double center, double width);
    // spatial preset scaled by (1 + modulation * sin(omega t))
    static KappaField separable(const KappaField& spatial, double modulation, double omega);
    static KappaField from_grid(const DomainSpec& domain, const TimeGrid& time,
                                std::vector<double> values);
    // coeffs laid out mode-major: coeffs[a * (t_degree+1) + b]
    static KappaField from_coefficients(int x_modes, int t_degree, std::vector<double> coeffs);

    bool is_zero() const;
    double bound() const { return bound_; }
    void set_bound(double b) { bound_ = b; }

    // evaluate on the basis grid over all time levels; throws ConfigError if
    // the bound max|kappa| <= bound() is violated
    Sample sample(const EigenBasis& basis, const TimeGrid& time) const;

private:
    enum class Kind { Zero, ClosedForm, Grid, Coefficients };
    Kind kind_ = Kind::Zero;
    double bound_ = 0.5;

    // closed form: value and analytic t-derivatives as functions of (domain, x, y, t)
    using ClosedForm = std::function<double(const DomainSpec&, double, double, double)>;
    ClosedForm f_, ft_, ftt_;

    // grid representation
    DomainSpec grid_domain_;
    TimeGrid grid_time_;
    std::vector<double> grid_values_;

    // coefficient representation
    int x_modes_ = 0;
    int t_degree_ = 0;
    std::vector<double> coeffs_;
};

// Legendre polynomial value and first two derivatives at z in [-1,1]
void legendre_eval(int degree, double z, double& p, double& dp, double& ddp);

} // namespace fracwave
