#pragma once

// Single photon-number sector of the trilinear (pump, signal, idler)
// Hamiltonian. A sector with n_total pump photons is spanned by
// |n_total - nu>_p |nu>_s |nu>_i, nu = 0..n_total, and the coupling matrix
// is tridiagonal with zero diagonal.

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "nli/errors.hpp"

namespace nli {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVectorX = VectorX<std::complex<Scalar>>;
template <typename Scalar>
using ComplexMatrixX = MatrixX<std::complex<Scalar>>;

struct FockSector {
    int n_total = 0;

    constexpr FockSector() = default;
    explicit FockSector(int n) : n_total(n) {
        if (n < 0) throw UsageError("FockSector: negative photon number " + std::to_string(n));
    }

    [[nodiscard]] constexpr int dim() const noexcept { return n_total + 1; }

    friend constexpr bool operator==(FockSector, FockSector) = default;
};

/// Dimensionless interaction strength tau = kappa * t of one amplifier.
class InteractionStrength {
public:
    explicit InteractionStrength(double tau) : tau_(tau) {
        if (!(tau >= 0.0) || !std::isfinite(tau))
            throw UsageError("interaction strength must be finite and >= 0, got " + std::to_string(tau));
    }

    [[nodiscard]] double value() const noexcept { return tau_; }
    /// Parametric-approximation gain g = sqrt(N) tau.
    [[nodiscard]] double gain(double n_mean) const { return std::sqrt(n_mean) * tau_; }

private:
    double tau_;
};

template <typename Scalar>
struct StateVector {
    FockSector sector;
    ComplexVectorX<Scalar> coeffs;

    /// |0>^(N): all photons in the pump, optionally carrying a global phase.
    static StateVector ground(FockSector sector, Scalar phase = Scalar(0)) {
        StateVector s{sector, ComplexVectorX<Scalar>::Zero(sector.dim())};
        s.coeffs(0) = std::polar(Scalar(1), phase);
        return s;
    }

    [[nodiscard]] Scalar norm() const { return coeffs.norm(); }
};

/// Phase-free off-diagonal of M(theta). theta is applied as a gauge
/// transform D(theta) = diag(exp(i nu theta)) at propagation time.
template <typename Scalar>
struct CouplingSpec {
    FockSector sector;
    Scalar theta = Scalar(0);
    VectorX<Scalar> offdiag;

    /// Dense Hermitian M(theta); M(nu+1, nu) = m_nu, M(nu, nu+1) = conj(m_nu).
    [[nodiscard]] ComplexMatrixX<Scalar> dense(Scalar phase) const {
        const int d = sector.dim();
        ComplexMatrixX<Scalar> m = ComplexMatrixX<Scalar>::Zero(d, d);
        for (int nu = 0; nu + 1 < d; ++nu) {
            const std::complex<Scalar> m_nu = std::polar(offdiag(nu), phase);
            m(nu + 1, nu) = m_nu;
            m(nu, nu + 1) = std::conj(m_nu);
        }
        return m;
    }
    [[nodiscard]] ComplexMatrixX<Scalar> dense() const { return dense(theta); }
};

template <typename Scalar = double>
CouplingSpec<Scalar> build_coupling(FockSector sector, Scalar theta = Scalar(0)) {
    const int n = sector.n_total;
    CouplingSpec<Scalar> c{sector, theta, VectorX<Scalar>(n)};
    for (int nu = 0; nu < n; ++nu)
        c.offdiag(nu) = Scalar(nu + 1) * std::sqrt(Scalar(n - nu));
    return c;
}

/// Eigen-pairs of the real symmetric tridiagonal M(0); columns of
/// `eigenvectors` are orthonormal, eigenvalues ascending.
template <typename Scalar>
struct SpectralDecomposition {
    FockSector sector;
    VectorX<Scalar> eigenvalues;
    MatrixX<Scalar> eigenvectors;

    [[nodiscard]] MatrixX<Scalar> reconstruct() const {
        return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
    }
};

template <typename Scalar>
SpectralDecomposition<Scalar> diagonalize(const CouplingSpec<Scalar>& coupling) {
    const int d = coupling.sector.dim();
    SpectralDecomposition<Scalar> s{coupling.sector, VectorX<Scalar>::Zero(d), MatrixX<Scalar>::Identity(d, d)};
    if (d == 1) return s;

    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver;
    const VectorX<Scalar> diag = VectorX<Scalar>::Zero(d);
    const VectorX<Scalar> sub = coupling.offdiag;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw NumericalError("tridiagonal eigensolver did not converge for sector N = " +
                             std::to_string(coupling.sector.n_total));
    s.eigenvalues = solver.eigenvalues();
    s.eigenvectors = solver.eigenvectors();
    return s;
}

/// x -> exp(-i tau M(0)) x, evaluated as V exp(-i tau L) V^T x. tau may be
/// negative (backward evolution).
template <typename Scalar>
ComplexVectorX<Scalar> evolve(const SpectralDecomposition<Scalar>& s, Scalar tau, const ComplexVectorX<Scalar>& x) {
    if (tau == Scalar(0)) return x;
    const auto& v = s.eigenvectors;
    const VectorX<Scalar> re = v.transpose() * x.real();
    const VectorX<Scalar> im = v.transpose() * x.imag();
    VectorX<Scalar> yr(re.size()), yi(re.size());
    for (Eigen::Index k = 0; k < re.size(); ++k) {
        const Scalar a = -tau * s.eigenvalues(k);
        const Scalar c = std::cos(a), sn = std::sin(a);
        yr(k) = c * re(k) - sn * im(k);
        yi(k) = sn * re(k) + c * im(k);
    }
    ComplexVectorX<Scalar> out(x.size());
    out.real() = v * yr;
    out.imag() = v * yi;
    return out;
}

/// Multiplies component nu by exp(i nu theta), i.e. applies D(theta).
template <typename Scalar>
void apply_gauge(ComplexVectorX<Scalar>& x, Scalar theta) {
    for (Eigen::Index nu = 1; nu < x.size(); ++nu)
        x(nu) *= std::polar(Scalar(1), Scalar(nu) * theta);
}

/// c -> exp(-i tau M(theta)) c = D(theta) V exp(-i tau L) V^T D(theta)^dagger c.
template <typename Scalar>
StateVector<Scalar> propagate(const StateVector<Scalar>& state, const SpectralDecomposition<Scalar>& spectral,
                              Scalar tau, Scalar theta) {
    if (!(state.sector == spectral.sector))
        throw UsageError("propagate: state sector N = " + std::to_string(state.sector.n_total) +
                         " does not match spectral sector N = " + std::to_string(spectral.sector.n_total));
    ComplexVectorX<Scalar> x = state.coeffs;
    apply_gauge(x, -theta);
    x = evolve(spectral, tau, x);
    apply_gauge(x, theta);
    return {state.sector, std::move(x)};
}

/// Mean photon numbers of the three modes in one sector. Signal and idler
/// share the index nu, so they are equal by construction.
template <typename Scalar>
struct ModeOccupation {
    Scalar pump;
    Scalar signal;
    Scalar idler;
};

template <typename Scalar>
ModeOccupation<Scalar> mode_occupation(const StateVector<Scalar>& state) {
    Scalar norm2 = 0, signal = 0;
    for (Eigen::Index nu = 0; nu < state.coeffs.size(); ++nu) {
        const Scalar p = std::norm(state.coeffs(nu));
        norm2 += p;
        signal += Scalar(nu) * p;
    }
    return {Scalar(state.sector.n_total) * norm2 - signal, signal, signal};
}

} // namespace nli
