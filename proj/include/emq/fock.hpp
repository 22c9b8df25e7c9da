// Truncated Fock-space linear algebra: density matrices, canonical operators,
// displacement, beamsplitters, tensor products and partial traces.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>

namespace emq {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Tolerances for the density-matrix contract.
struct StateTolerances {
    double hermiticity = 1e-12;
    double trace = 1e-10;
    double psd = 1e-9;
};

struct TruncationPolicy {
    double max_tail = 0.01;   // discarded population above which construction throws
    bool renormalize = true;  // rescale to unit trace after truncation
};

// Complex Hermitian trace-one operator on a truncated Fock space.
class DensityMatrix {
  public:
    DensityMatrix() = default;

    // Validates Hermiticity, unit trace and positivity; throws on violation.
    static DensityMatrix from_matrix(const Matrix& m, const StateTolerances& tol = {});

    // Embeds a smaller matrix into `dim` with zero padding. The trace deficit is
    // reported through *trace_deficit; renormalization is optional (fixture
    // tables are published as 3x3 blocks of unit-trace d=16 states).
    static DensityMatrix embed(const Matrix& block, int dim, bool renormalize,
                               double* trace_deficit = nullptr);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    cxd element(int i, int j) const { return m_(i, j); }
    double population(int n) const { return m_(n, n).real(); }
    Eigen::VectorXd populations() const { return m_.diagonal().real(); }
    double mean_occupation() const;
    double purity() const { return (m_ * m_).trace().real(); }

    std::string to_json() const;  // {"dim": d, "re": [[..]], "im": [[..]]}
    static DensityMatrix from_json(const std::string& text, const StateTolerances& tol = {});

  private:
    Matrix m_;
};

// --- state constructors ---

// Truncated, unnormalized coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!).
Vector coherent_amplitudes(cxd alpha, int dim);

// Pure coherent-state projector, renormalized after truncation.
DensityMatrix coherent_state(cxd alpha, int dim, const TruncationPolicy& pol = {});

// Bose-Einstein populations nbar^n/(nbar+1)^(n+1) (not renormalized).
Eigen::VectorXd thermal_populations(double nbar, int dim);

// Diagonal thermal state, renormalized after truncation.
DensityMatrix thermal_state(double nbar, int dim, const TruncationPolicy& pol = {});

DensityMatrix fock_state(int n, int dim);

// --- operators ---

Matrix annihilation_operator(int dim);
Eigen::VectorXd number_operator_diagonal(int dim);
Matrix number_operator(int dim);

// D(alpha)=exp(alpha a^dag - alpha^* a), evaluated by scaling-and-squaring at a
// larger working dimension (default 2x) and projected down to suppress edge
// artifacts. Unitary on the low-occupation block only.
Matrix displacement_operator(cxd alpha, int dim, int working_dim = 0);

// --- two-mode structure (lexicographic |n_A> x |n_B> ordering) ---

struct TwoModeState {
    int dim_a = 0;
    int dim_b = 0;
    Matrix m;
};

TwoModeState tensor_product(const DensityMatrix& a, const DensityMatrix& b);

enum class Mode { A, B };

// Reduced state of the kept mode; trace preserved.
DensityMatrix partial_trace(const TwoModeState& state, Mode keep,
                            const StateTolerances& tol = {});
Matrix partial_trace_matrix(const Matrix& m, int dim_a, int dim_b, Mode keep);

// Two-mode unitary exp[theta (a1 a2^dag - a1^dag a2)]; Heisenberg action
//   a1 -> cos(theta) a1 - sin(theta) a2,  a2 -> sin(theta) a1 + cos(theta) a2.
// theta=0 is the identity, theta=pi/2 swaps the modes.
Matrix beamsplitter_unitary(double theta, int dim);

// --- helpers ---

Matrix hermitize(const Matrix& m);  // (m + m^dag)/2
double min_eigenvalue(const Matrix& hermitian);

}  // namespace emq
