"""Best l1-norm approximation of a polynomial by a sum of squares.

Given f and a degree bound 2d >= deg f, the closest SOS polynomial in the
l1 coefficient norm has the form

    g = f + lam_0 + sum_i lam_i * x_i^{2d},       lam >= 0,

and the distance is rho = sum_i lam_i.  The multipliers solve the program

    min  sum lam_i   s.t.  f + lam_0 + sum_i lam_i x_i^{2d} is SOS,

whose moment-side counterpart

    min  L_y(f)   s.t.  M_d(y) PSD,  L_y(1) <= 1,  L_y(x_i^{2d}) <= 1

is what actually gets handed to the conic solver: its constraint
multipliers are exactly (X*, lam*) where X* is the Gram matrix of g, its
variables give the optimal moment vector y*, and rho = -L_{y*}(f) with zero
duality gap.  A coefficient-wise formulation over all of R[x]_{2d} is kept
behind ``full_form=True`` for cross-validation on tiny instances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .moment import (
    MomentVector,
    basis_products,
    enumerate_basis,
    moment_matrix,
    riesz,
)
from .poly import Monomial, Polynomial
from .sdp import (
    ConicProblem,
    ConicSolution,
    NonNegBlock,
    PsdBlock,
    SolverOptions,
    Status,
    SymEntries,
    VecEntries,
    solve,
)

# Multipliers this far below zero are solver noise and get clipped; anything
# worse is treated as a failed solve.
_CLIP_TOL = 1e-9
_EIG_CLIP_REL = 1e-9
_SOS_RHO_TOL = 1e-7


class SolverFailure(RuntimeError):
    """The conic solver did not reach Optimal status."""

    def __init__(self, message: str, solution: ConicSolution | None = None):
        super().__init__(message)
        self.solution = solution


@dataclass(frozen=True, eq=False)
class SosCertificate:
    """Explicit decomposition g ~ sum_k weights[k] * squares[k]^2.

    ``residual`` is the l1 norm of the reconstruction error; all weights are
    strictly positive.
    """

    squares: tuple[Polynomial, ...]
    weights: tuple[float, ...]
    residual: float

    @property
    def is_sos(self) -> bool:
        return True


@dataclass(frozen=True, eq=False)
class SosRefutation:
    """Witness that a polynomial is not a sum of squares: a moment vector y
    with M_d(y) PSD but L_y(g) < 0 (no such y exists for SOS g)."""

    witness: MomentVector
    value: float

    @property
    def is_sos(self) -> bool:
        return False


@dataclass(frozen=True)
class SolverReport:
    status: Status
    iterations: int
    gap: float
    feas_primal: float
    feas_dual: float


@dataclass(frozen=True, eq=False)
class ApproximationResult:
    """Output of :func:`best_l1_sos_approximation`.

    Attributes
    ----------
    lam : array, shape (n + 1,)
        Nonnegative perturbation coefficients (constant term first, then one
        per variable for x_i^{2d}).
    rho : float
        The l1 distance sum(lam).
    g : Polynomial
        The approximant f + lam_0 + sum_i lam_i x_i^{2d}.
    y_star : MomentVector
        Optimal moment vector of the dual program; rho = -L_{y_star}(f).
    gram : array
        PSD Gram matrix of g over the degree-d basis.
    certificate : SosCertificate
        Eigendecomposition-based square extraction from ``gram``.
    solver : SolverReport
    """

    lam: np.ndarray
    rho: float
    g: Polynomial
    y_star: MomentVector
    gram: np.ndarray
    certificate: SosCertificate
    solver: SolverReport


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    tolerance: float


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[Check, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            flag = "pass" if c.passed else "FAIL"
            lines.append(
                f"{c.name:<28s} {flag}  residual={c.residual:.3e}  tol={c.tolerance:.3e}"
            )
        return "\n".join(lines)


def motzkin_like() -> Polynomial:
    """x1^2 x2^2 (x1^2 + x2^2 - 1) + 1/27: nonnegative on R^2 but not a sum
    of squares, with minimum 0 at (+-(1/3)^(1/2), +-(1/3)^(1/2))."""
    x1 = Polynomial.variable(2, 0)
    x2 = Polynomial.variable(2, 1)
    return x1**2 * x2**2 * (x1**2 + x2**2 - 1.0) + 1.0 / 27.0


def _check_degree(f: Polynomial, d: int) -> None:
    if d < 1:
        raise ValueError("degree bound d must be >= 1")
    if 2 * d < f.degree():
        raise ValueError(
            f"degree bound too small: need 2d >= deg f = {f.degree()}, got 2d = {2 * d}"
        )


def _perturbation_monomials(n: int, two_d: int) -> list[Monomial]:
    """The constant monomial followed by x_i^{2d} for each variable."""
    pattern = [(0,) * n]
    for i in range(n):
        pattern.append(tuple(two_d if j == i else 0 for j in range(n)))
    return pattern


def _padded_coefficients(f: Polynomial, product_basis) -> np.ndarray:
    out = np.zeros(len(product_basis))
    for mono, coeff in f.terms.items():
        out[product_basis.index_of(mono)] = coeff
    return out


def _assemble_moment_side(f: Polynomial, d: int, tied: bool) -> ConicProblem:
    """Conic form of the moment-side program.

    One constraint per monomial alpha of degree <= 2d, with right-hand side
    f_alpha (zero-padded).  Constraint multipliers form the pair
    (Gram matrix X, multipliers lam); ``tied=True`` merges the n + 1 scalar
    inequalities into one, which ties the lam_i to a single epsilon.
    """
    n = f.n
    bp = basis_products(n, d)
    pattern = _perturbation_monomials(n, 2 * d)
    pattern_index = {mono: i for i, mono in enumerate(pattern)}
    s = len(bp.basis)
    count = 1 if tied else n + 1
    blocks = (PsdBlock(s), NonNegBlock(count))
    c = (np.zeros((s, s)), np.ones(count))
    b = _padded_coefficients(f, bp.product_basis)
    constraints = []
    for alpha in bp.product_basis.monomials:
        rows, cols = bp.upper_entries(alpha)
        con: dict[int, SymEntries | VecEntries] = {
            0: SymEntries(rows, cols, np.ones(rows.size))
        }
        slot = pattern_index.get(alpha)
        if slot is not None:
            con[1] = VecEntries([0 if tied else slot], [-1.0])
        constraints.append(con)
    return ConicProblem(blocks, c, tuple(constraints), b)


def assemble_reduced_dual(f: Polynomial, d: int) -> ConicProblem:
    """The moment-side conic program for f at degree bound 2d.

    Block structure: one PSD block of dimension s(d) and one nonnegative
    block of size n + 1; one constraint per monomial of degree <= 2d with
    right-hand side f_alpha.
    """
    _check_degree(f, d)
    return _assemble_moment_side(f, d, tied=False)


def assemble_full_form(f: Polynomial, d: int) -> ConicProblem:
    """Coefficient-wise formulation: minimize sum_alpha lam_alpha subject to
    |f_alpha - g_alpha| <= lam_alpha with g ranging over SOS polynomials.

    Much larger than the reduced program (2 s(2d) constraints instead of
    s(2d)); kept for cross-validation on tiny instances.
    """
    _check_degree(f, d)
    n = f.n
    bp = basis_products(n, d)
    s = len(bp.basis)
    m1 = len(bp.product_basis)
    fvec = _padded_coefficients(f, bp.product_basis)
    # Blocks: Gram matrix X, lam, slack u (plus side), slack v (minus side).
    blocks = (PsdBlock(s), NonNegBlock(m1), NonNegBlock(m1), NonNegBlock(m1))
    c = (np.zeros((s, s)), np.ones(m1), np.zeros(m1), np.zeros(m1))
    constraints = []
    b = np.concatenate([fvec, -fvec])
    for sign in (1.0, -1.0):
        for k, alpha in enumerate(bp.product_basis.monomials):
            rows, cols = bp.upper_entries(alpha)
            con: dict[int, SymEntries | VecEntries] = {
                0: SymEntries(rows, cols, sign * np.ones(rows.size)),
                1: VecEntries([k], [1.0]),
            }
            slack_block = 2 if sign > 0 else 3
            con[slack_block] = VecEntries([k], [-1.0])
            constraints.append(con)
    return ConicProblem(blocks, c, tuple(constraints), b)


def _extract_certificate(
    gram: np.ndarray, basis, g: Polynomial
) -> SosCertificate:
    """Square extraction by eigendecomposition, clipping eigenvalues below
    1e-9 * max eigenvalue, with the l1 reconstruction residual against g."""
    gram = 0.5 * (gram + gram.T)
    evals, evecs = np.linalg.eigh(gram)
    lmax = float(evals[-1]) if evals.size else 0.0
    squares: list[Polynomial] = []
    weights: list[float] = []
    if lmax > 0.0:
        for val, vec in zip(evals, evecs.T):
            if val <= _EIG_CLIP_REL * lmax:
                continue
            q = Polynomial(
                basis.n, dict(zip(basis.monomials, vec))
            )
            squares.append(q)
            weights.append(float(val))
    recon = Polynomial.zero(g.n)
    for w, q in zip(weights, squares):
        recon = recon + w * (q * q)
    residual = (g - recon).l1_norm()
    return SosCertificate(tuple(squares), tuple(weights), residual)


def _clip_multipliers(raw: np.ndarray, sol: ConicSolution) -> np.ndarray:
    if float(raw.min(initial=0.0)) < -_CLIP_TOL:
        raise SolverFailure(
            f"multiplier {raw.min():.3e} below -{_CLIP_TOL:.0e}; solve did not "
            "reach the required accuracy",
            sol,
        )
    return np.clip(raw, 0.0, None)


def _degenerate_result(f: Polynomial, d: int) -> ApproximationResult:
    n = f.n
    basis2d = enumerate_basis(n, 2 * d)
    s = len(enumerate_basis(n, d))
    cert = SosCertificate((), (), 0.0)
    report = SolverReport(Status.OPTIMAL, 0, 0.0, 0.0, 0.0)
    return ApproximationResult(
        lam=np.zeros(n + 1),
        rho=0.0,
        g=Polynomial.zero(n),
        y_star=MomentVector(basis2d, np.zeros(len(basis2d))),
        gram=np.zeros((s, s)),
        certificate=cert,
        solver=report,
    )


def _report(sol: ConicSolution) -> SolverReport:
    return SolverReport(
        status=sol.status,
        iterations=sol.iterations,
        gap=sol.gap,
        feas_primal=sol.feas_primal,
        feas_dual=sol.feas_dual,
    )


def _perturbation(n: int, pattern, lam: np.ndarray) -> Polynomial:
    return Polynomial(n, {mono: v for mono, v in zip(pattern, lam)})


def best_l1_sos_approximation(
    f: Polynomial,
    d: int,
    options: SolverOptions | None = None,
    full_form: bool = False,
) -> ApproximationResult:
    """Closest SOS polynomial of degree <= 2d to f in the l1 coefficient
    norm, together with the distance, multipliers, moment vector, Gram
    matrix and an explicit certificate.

    Raises SolverFailure (with the raw solution attached) if the conic
    solver does not reach Optimal status.
    """
    _check_degree(f, d)
    if f.is_zero():
        return _degenerate_result(f, d)
    norm = f.l1_norm()
    if norm > 1e6 or norm < 1e-6:
        warnings.warn(
            f"input has l1 norm {norm:.3e}; multipliers are reported in the "
            "same units and the solve may be ill-conditioned",
            RuntimeWarning,
            stacklevel=2,
        )

    n = f.n
    pattern = _perturbation_monomials(n, 2 * d)
    bp = basis_products(n, d)

    if full_form:
        # Coefficient-wise encoding: same optimal value, but the optimizer
        # may be any point of the optimal face, so g is read off the Gram
        # block rather than rebuilt from the n + 1 structured multipliers.
        # On instances with a unique approximant the two encodings coincide.
        problem = assemble_full_form(f, d)
        sol = solve(problem, options)
        if sol.status != Status.OPTIMAL:
            raise SolverFailure(_failure_message(sol), sol)
        m1 = len(bp.product_basis)
        lam_all = np.clip(np.asarray(sol.primal[1]), 0.0, None)
        lam = np.array([lam_all[bp.product_basis.index_of(p)] for p in pattern])
        gram = np.asarray(sol.primal[0])
        g = bp.gram_polynomial(gram)
        y_star = MomentVector(bp.product_basis, sol.dual[m1:] - sol.dual[:m1])
        certificate = _extract_certificate(gram, bp.basis, g)
        return ApproximationResult(
            lam=lam,
            rho=(g - f).l1_norm(),
            g=g,
            y_star=y_star,
            gram=gram,
            certificate=certificate,
            solver=_report(sol),
        )
    problem = assemble_reduced_dual(f, d)
    sol = solve(problem, options)
    if sol.status != Status.OPTIMAL:
        raise SolverFailure(_failure_message(sol), sol)
    lam = _clip_multipliers(np.asarray(sol.primal[1]), sol)
    gram = np.asarray(sol.primal[0])
    y_vals = -sol.dual

    rho = float(lam.sum())
    g = f + _perturbation(n, pattern, lam)
    # Cross-check the two reconstructions of g: from the multipliers and
    # from the Gram block.  A mismatch means the solve was not as accurate
    # as its status claims.
    gram_dev = float(
        np.max(np.abs(bp.gram_coefficients(gram) - _padded_coefficients(g, bp.product_basis)))
    )
    if gram_dev > 1e-7:
        raise SolverFailure(
            f"Gram matrix reproduces g only to {gram_dev:.3e} (needs 1e-7)", sol
        )
    y_star = MomentVector(bp.product_basis, y_vals)
    certificate = _extract_certificate(gram, bp.basis, g)
    return ApproximationResult(
        lam=lam,
        rho=rho,
        g=g,
        y_star=y_star,
        gram=gram,
        certificate=certificate,
        solver=_report(sol),
    )


def _failure_message(sol: ConicSolution) -> str:
    return (
        f"conic solve ended with status {sol.status.value} after "
        f"{sol.iterations} iterations (gap={sol.gap:.3e}, "
        f"feas_primal={sol.feas_primal:.3e}, feas_dual={sol.feas_dual:.3e})"
    )


def _assemble_membership(g: Polynomial, d: int) -> ConicProblem:
    """Feasibility program: find PSD X with <X, B_alpha> = g_alpha for all
    alpha of degree <= 2d (objective zero)."""
    bp = basis_products(g.n, d)
    s = len(bp.basis)
    blocks = (PsdBlock(s),)
    c = (np.zeros((s, s)),)
    b = _padded_coefficients(g, bp.product_basis)
    constraints = []
    for alpha in bp.product_basis.monomials:
        rows, cols = bp.upper_entries(alpha)
        constraints.append({0: SymEntries(rows, cols, np.ones(rows.size))})
    return ConicProblem(blocks, c, tuple(constraints), b)


def is_sos(
    g: Polynomial, d: int, options: SolverOptions | None = None
) -> SosCertificate | SosRefutation:
    """Decide SOS membership at degree bound 2d.

    Solves the Gram feasibility program; a feasible solve yields a
    certificate by eigendecomposition.  When the solver cannot produce a
    strictly feasible Gram matrix (infeasible, or feasible only on the
    boundary of the PSD cone), the bounded moment-side program settles the
    question: distance ~ 0 means g is SOS and supplies the Gram matrix,
    positive distance supplies the refutation witness y with M_d(y) PSD and
    L_y(g) = -distance < 0.
    """
    _check_degree(g, d)
    if g.is_zero():
        return SosCertificate((), (), 0.0)
    basis = enumerate_basis(g.n, d)
    sol = solve(_assemble_membership(g, d), options)
    if sol.status == Status.OPTIMAL:
        return _extract_certificate(np.asarray(sol.primal[0]), basis, g)
    result = best_l1_sos_approximation(g, d, options)
    if result.rho <= _SOS_RHO_TOL:
        return _extract_certificate(result.gram, basis, g)
    return SosRefutation(witness=result.y_star, value=riesz(result.y_star, g))


def uniform_sos_perturbation(
    f: Polynomial, d: int, options: SolverOptions | None = None
) -> tuple[float, Polynomial]:
    """Smallest eps >= 0 with f + eps * (1 + sum_i x_i^{2d}) a sum of
    squares, found by tying all perturbation multipliers to one scalar.
    Returns (eps, perturbed polynomial)."""
    _check_degree(f, d)
    if f.is_zero():
        return 0.0, f
    problem = _assemble_moment_side(f, d, tied=True)
    sol = solve(problem, options)
    if sol.status != Status.OPTIMAL:
        raise SolverFailure(_failure_message(sol), sol)
    eps = float(max(sol.primal[1][0], 0.0))
    pattern = _perturbation_monomials(f.n, 2 * d)
    g = f + _perturbation(f.n, pattern, np.full(f.n + 1, eps))
    return eps, g


def verify(result: ApproximationResult, f: Polynomial, d: int) -> VerificationReport:
    """Independently recheck every structural invariant of a result.

    Nothing from the solver run is reused; every quantity is recomputed from
    the result fields, f and d.  Failures are report entries, not
    exceptions.
    """
    checks: list[Check] = []
    n = f.n
    pattern = _perturbation_monomials(n, 2 * d)
    pattern_set = set(pattern)
    lam = np.asarray(result.lam, dtype=float)
    rho = float(result.rho)

    # Multipliers are nonnegative.
    neg = max(0.0, -float(lam.min(initial=0.0)))
    checks.append(Check("nonnegative_multipliers", neg == 0.0, neg, 0.0))

    # g - f is supported on {1, x_i^{2d}} and matches lam there.
    diff = result.g - f
    off_pattern = sum(
        abs(c) for mono, c in diff.terms.items() if mono not in pattern_set
    )
    pattern_dev = max(
        abs(diff.coefficient(mono) - lam[i]) for i, mono in enumerate(pattern)
    )
    structure_res = max(off_pattern, pattern_dev)
    structure_tol = 1e-9 * (1.0 + rho)
    checks.append(
        Check(
            "perturbation_structure",
            structure_res <= structure_tol,
            structure_res,
            structure_tol,
        )
    )

    # rho equals the l1 distance.
    dist_res = abs(rho - diff.l1_norm())
    dist_tol = 1e-9 * (1.0 + rho)
    checks.append(Check("rho_equals_l1_distance", dist_res <= dist_tol, dist_res, dist_tol))

    # The Gram matrix reproduces the coefficients of g.
    bp = basis_products(n, d)
    coeffs = bp.gram_coefficients(np.asarray(result.gram))
    gvec = _padded_coefficients(result.g, bp.product_basis)
    gram_res = float(np.max(np.abs(coeffs - gvec)))
    checks.append(Check("gram_reproduces_g", gram_res <= 1e-7, gram_res, 1e-7))

    # The Gram matrix is PSD.
    evals = np.linalg.eigvalsh(0.5 * (result.gram + result.gram.T))
    lmax = float(evals[-1]) if evals.size else 0.0
    psd_res = max(0.0, -float(evals[0]))
    psd_tol = 1e-8 * (1.0 + lmax)
    checks.append(Check("gram_psd", psd_res <= psd_tol, psd_res, psd_tol))

    # Zero duality gap: rho = -L_{y*}(f).
    gap_res = abs(rho + riesz(result.y_star, f))
    gap_tol = 1e-7 * (1.0 + rho)
    checks.append(Check("zero_duality_gap", gap_res <= gap_tol, gap_res, gap_tol))

    # y* is feasible for the moment-side program.
    m_eigs = np.linalg.eigvalsh(moment_matrix(result.y_star, d))
    feas_res = max(0.0, -float(m_eigs[0]))
    corners = [result.y_star.value(mono) for mono in pattern]
    feas_res = max(feas_res, max(0.0, max(corners) - 1.0))
    checks.append(Check("moment_vector_feasible", feas_res <= 1e-8, feas_res, 1e-8))

    # Certificate weights are positive and the squares rebuild g.
    weights = np.asarray(result.certificate.weights, dtype=float)
    wmin = float(weights.min()) if weights.size else 1.0
    checks.append(Check("certificate_weights_positive", wmin > 0.0, max(0.0, -wmin), 0.0))
    recon = Polynomial.zero(n)
    for w, q in zip(result.certificate.weights, result.certificate.squares):
        recon = recon + w * (q * q)
    cert_res = (result.g - recon).l1_norm()
    cert_tol = 1e-6 * (1.0 + result.g.l1_norm())
    checks.append(
        Check("certificate_reconstruction", cert_res <= cert_tol, cert_res, cert_tol)
    )

    return VerificationReport(tuple(checks))
