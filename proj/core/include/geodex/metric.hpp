#pragma once

#include "geodex/chart.hpp"

#include <memory>
#include <string>
#include <vector>

namespace geodex {

// Riemannian metric on a single chart.  Components and their first and
// second partial derivatives are exposed pointwise; built-in families carry
// closed forms so that the error budget of downstream ODE work is dominated
// by integration error, not differentiation noise.
class MetricField {
public:
    explicit MetricField(ChartDomain domain, double inj_lower_bound)
        : domain_(std::move(domain)), inj_lb_(inj_lower_bound) {}
    virtual ~MetricField() = default;

    const ChartDomain& domain() const { return domain_; }
    int dimension() const { return domain_.dimension(); }

    virtual Mat components(const Vec& x) const = 0;
    virtual Mat d_components(const Vec& x, int k) const = 0;
    virtual Mat dd_components(const Vec& x, int k, int l) const = 0;

    // True when the components are position-independent (flat connection);
    // lets the integrators take closed-form shortcuts.
    virtual bool is_constant() const { return false; }

    virtual std::string family_tag() const = 0;

    // Supplied per family; never computed.  Only a lower bound is needed
    // (intersection strand separation, perturbation ball sizing).
    double inj_lower_bound() const { return inj_lb_; }

protected:
    ChartDomain domain_;
    double inj_lb_;
};

using MetricPtr = std::shared_ptr<const MetricField>;

// g_ij = diag(a_1..a_n), constant over the chart.  a_i = 1 gives the flat
// metric.
class ConstantDiagonalMetric final : public MetricField {
public:
    ConstantDiagonalMetric(ChartDomain domain, Vec diag);
    ConstantDiagonalMetric(ChartDomain domain, Vec diag, double inj_lower_bound);

    Mat components(const Vec&) const override { return g_; }
    Mat d_components(const Vec&, int) const override { return Mat::Zero(dimension(), dimension()); }
    Mat dd_components(const Vec&, int, int) const override { return Mat::Zero(dimension(), dimension()); }
    bool is_constant() const override { return true; }
    std::string family_tag() const override;

    const Vec& diag() const { return diag_; }

private:
    Vec diag_;
    Mat g_;
};

MetricPtr make_flat(ChartDomain domain);

// Scalar profile phi for conformal metrics g = exp(2 phi) * delta.
class ConformalProfile {
public:
    virtual ~ConformalProfile() = default;
    virtual double phi(const Vec& x) const = 0;
    virtual Vec grad(const Vec& x) const = 0;
    virtual Mat hess(const Vec& x) const = 0;
    virtual std::string tag() const = 0;
    virtual bool rotationally_symmetric() const { return false; }
};

// phi = log(2 / (1 + kappa |x|^2)): constant sectional curvature kappa.
// kappa = 1 is the stereographic chart of the unit sphere.
class SphereCapProfile final : public ConformalProfile {
public:
    explicit SphereCapProfile(double kappa) : kappa_(kappa) {}
    double phi(const Vec& x) const override;
    Vec grad(const Vec& x) const override;
    Mat hess(const Vec& x) const override;
    std::string tag() const override;
    bool rotationally_symmetric() const override { return true; }
    double kappa() const { return kappa_; }

private:
    double kappa_;
};

// phi = A * plateau(|x - c| / R): compactly supported radial profile.
// On a torus the radial distance uses the shortest lattice representative.
class RadialBumpProfile final : public ConformalProfile {
public:
    RadialBumpProfile(const ChartDomain& domain, Vec center, double radius, double amplitude);
    double phi(const Vec& x) const override;
    Vec grad(const Vec& x) const override;
    Mat hess(const Vec& x) const override;
    std::string tag() const override;
    bool rotationally_symmetric() const override;

private:
    ChartDomain domain_;
    Vec center_;
    double radius_;
    double amplitude_;
};

// phi = A * prod_i cos(2 pi k_i x_i / P_i): periodic profile on a torus.
class PeriodicBumpProfile final : public ConformalProfile {
public:
    PeriodicBumpProfile(const ChartDomain& torus, std::vector<int> wave, double amplitude);
    double phi(const Vec& x) const override;
    Vec grad(const Vec& x) const override;
    Mat hess(const Vec& x) const override;
    std::string tag() const override;

private:
    Vec periods_;
    std::vector<int> wave_;
    double amplitude_;
};

class ConformalMetric final : public MetricField {
public:
    ConformalMetric(ChartDomain domain, std::shared_ptr<const ConformalProfile> profile,
                    double inj_lower_bound);

    Mat components(const Vec& x) const override;
    Mat d_components(const Vec& x, int k) const override;
    Mat dd_components(const Vec& x, int k, int l) const override;
    std::string family_tag() const override;

    const ConformalProfile& profile() const { return *profile_; }

private:
    std::shared_ptr<const ConformalProfile> profile_;
};

MetricPtr make_sphere_cap(ChartDomain domain, double kappa);

// ---------------------------------------------------------------------------
// Pointwise differential-geometric quantities.

// Inverse components; throws NonPositiveDefiniteError if g(x) is not SPD.
Mat inverse_components(const Mat& g, const Vec& x_for_message);

// Pointwise bundle shared by the ODE right-hand sides; computing it once per
// evaluation point avoids re-deriving the connection.
struct MetricJet {
    Mat g;
    Mat ginv;
    std::vector<Mat> dg;     // dg[k] = d_k g
    std::vector<Mat> gamma;  // gamma[k](i,j) = Gamma^k_ij
};

MetricJet metric_jet(const MetricField& m, const Vec& x);

// Gamma[k](i,j) = Gamma^k_ij of the Levi-Civita connection.
std::vector<Mat> christoffel(const MetricField& m, const Vec& x);

// Matrix K(x, v) with K * Y = R(Y, v) v (curvature term of the Jacobi
// equation).  Convention fixed so that the unit sphere gives K = Id on the
// orthogonal complement of a unit v.
Mat curvature_operator(const MetricField& m, const Vec& x, const Vec& v);
Mat curvature_operator(const MetricField& m, const Vec& x, const Vec& v, const MetricJet& jet);

Vec curvature_term(const MetricField& m, const Vec& x, const Vec& Y, const Vec& v);

double inner(const MetricField& m, const Vec& x, const Vec& u, const Vec& w);
double norm(const MetricField& m, const Vec& x, const Vec& u);

// g-orthonormal basis of the complement of `anchor` (assumed nonzero).
// Coordinate axes are projected, dropping the axis most parallel to
// `drop_selector` (largest absolute component); deterministic.
std::vector<Vec> frame_complement(const MetricField& m, const Vec& x,
                                  const Vec& anchor, const Vec& drop_selector);

// Full g-orthonormal frame at x by Gram-Schmidt over the coordinate basis.
std::vector<Vec> orthonormal_frame(const MetricField& m, const Vec& x);

// Deterministic probe points inside the domain (for validation sweeps).
std::vector<Vec> probe_points(const ChartDomain& domain, int count, unsigned seed);

// Smallest metric eigenvalue over probe points; > 0 means positive definite
// on the sample.
double min_metric_eigenvalue(const MetricField& m, int probes, unsigned seed);

// Max relative disagreement between analytic first derivatives and central
// finite differences of components over probe points.
double derivative_consistency(const MetricField& m, int probes, unsigned seed);

} // namespace geodex
