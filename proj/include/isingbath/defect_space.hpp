// defect_space.hpp — two-defect Hilbert space, bases, and the exact dephasing map

#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>

#include "isingbath/dephasing.hpp"

namespace isingbath {

enum class Basis { StandardZ, Bell, Pointer };

// 4x4 two-qubit density matrix with a declared basis. `placement` records
// which pointer basis the matrix refers to and is meaningful only when
// basis == Pointer. StandardZ order: |uu>, |ud>, |du>, |dd> with |u>, |d> the
// sigma_z eigenstates. Bell order: |phi_S>, |psi_S>, |phi_A>, |psi_A> with
// |phi_{S,A}> = (|uu> +- |dd>)/sqrt(2), |psi_{S,A}> = (|ud> +- |du>)/sqrt(2).
struct DefectState {
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    Basis basis = Basis::StandardZ;
    Placement placement = Placement::DistantSites;
};

// Joint eigenbasis of the commuting coupling operators S_x^S and S_x^A.
// Columns of `vectors` are the pointer states in StandardZ coordinates; the
// +1 eigenvector of each sector is listed first, built as
// (|phi> + |psi>)/sqrt(2) with a fixed phase.
//
// DistantSites eigenvalue pairs (s_S, s_A): (+1,0), (-1,0), (0,+1), (0,-1) —
// S_x^S (S_x^A) acts only on the symmetric (antisymmetric) Bell sector.
// SameSite: eigenbasis of the single operator S_x with eigenvalues
// (+1, -1, 0, 0); the two 0-eigenvectors are |phi_A>, |psi_A> and both
// sectors dephase against the same eigenvalue, encoded as pairs
// (+1,+1), (-1,-1), (0,0), (0,0).
struct PointerBasis {
    Placement placement = Placement::DistantSites;
    Eigen::Matrix4cd vectors = Eigen::Matrix4cd::Identity();
    std::array<double, 4> s_S{};
    std::array<double, 4> s_A{};

    static PointerBasis make(Placement placement);
};

// Columns are the Bell states in StandardZ coordinates.
Eigen::Matrix4cd bell_from_standard();

// Flip operators on the symmetric/antisymmetric Bell sectors, in StandardZ
// coordinates: S_x^S = |psi_S><phi_S| + h.c., S_x^A = |psi_A><phi_A| + h.c.
Eigen::Matrix4cd coupling_operator_S();
Eigen::Matrix4cd coupling_operator_A();

// Pure separable state (cos aA |u> + sin aA |d>) (x) (cos aB |u> + sin aB |d>)
// in the StandardZ basis.
DefectState product_state(double alpha_A, double alpha_B);

// Bell projector |b><b| in the Bell basis; index 0..3 = phi_S, psi_S, phi_A, psi_A.
DefectState bell_state(int index);

// Unitary change of basis. `pointer_placement` selects the pointer basis when
// target == Pointer; conversions from Pointer use the state's own placement.
DefectState to_basis(const DefectState& state, Basis target,
                     Placement pointer_placement = Placement::DistantSites);

// Exact dephasing map at coeffs.times[t_index], evolving from t=0. Element
// (i,j) in the pointer basis is multiplied by
//   exp(-[f_S (s_i^S - s_j^S)^2 + f_A (s_i^A - s_j^A)^2]
//       + i [phi_S ((s_i^S)^2 - (s_j^S)^2) + phi_A ((s_i^A)^2 - (s_j^A)^2)]).
// Diagonal elements are invariant. Returns the state in the Pointer basis.
// Coefficients are always measured from the initial time; evolve(t1) followed
// by evolve(t2) does not compose and is not offered.
DefectState evolve(const DefectState& state, const DephasingCoefficients& coeffs,
                   std::size_t t_index);

// Defect Zeeman operator -2h S_z in the Bell basis, with
// S_z = |phi_S><phi_A| + |phi_A><phi_S|. Used by spectral feasibility
// reporting only; the dephasing map assumes degenerate defects (h = 0).
Eigen::Matrix4cd zeeman_matrix(double h);

// Hermiticity / trace / positivity diagnostics.
struct StateCheck {
    double hermiticity_error = 0.0;  // max |rho - rho^dagger|
    double trace_error = 0.0;        // |tr(rho) - 1|
    double min_eigenvalue = 0.0;

    bool ok(double herm_tol = 1e-12, double trace_tol = 1e-12,
            double psd_tol = -1e-10) const noexcept {
        return hermiticity_error <= herm_tol && trace_error <= trace_tol &&
               min_eigenvalue >= psd_tol;
    }
};

StateCheck check_state(const DefectState& state);

// Snapshot rows: t, basis tag, then 16 complex entries row-major as re/im pairs.
void write_state_csv_header(std::ostream& out);
void append_state_csv_row(std::ostream& out, double t, const DefectState& state);

inline const char* to_string(Basis b) noexcept {
    switch (b) {
        case Basis::StandardZ: return "standard_z";
        case Basis::Bell: return "bell";
        default: return "pointer";
    }
}

} // namespace isingbath
