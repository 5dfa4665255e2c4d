"""Grid audits of the two auxiliary inequalities behind the small-gradient bound."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import make_grid
from .kernels import (GammaLaw, PRINTED_CUBE_CONSTANT, VALID_CUBE_CONSTANT,
                      cube_sup_bound, prop_b1_margin)


@dataclass(frozen=True)
class AuditLine:
    name: str
    passed: bool
    detail: str

    def render(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def b1_margin_grid(law: GammaLaw, n: int = 100, alpha_lo: float = -0.9,
                   beta_lo: float = 0.0, hi: float = 10.0):
    """Margins on an n x n grid, alpha in (alpha_lo, beta], beta in (beta_lo, hi]."""
    betas = np.linspace(beta_lo, hi, n + 1)[1:]
    out = np.empty((n, n))
    for j, b in enumerate(betas):
        alphas = np.linspace(alpha_lo, b, n + 1)[1:]
        out[:, j] = prop_b1_margin(alphas, np.full(n, b), law)
    return out


def quartic_counterexample(n: int = 4097, constant: float = PRINTED_CUBE_CONSTANT):
    """(lhs, rhs) for g = (1 - x^2)^2 on [-1, 1], zero-padded to [-1.5, 1.5]."""
    g = make_grid(-1.5, 1.5, n)
    x = g.xi
    vals = np.where(np.abs(x) < 1.0, (1.0 - x * x) ** 2, 0.0)
    return cube_sup_bound(g.with_values(vals), constant)


def quartic_exact_rhs(constant: float) -> float:
    """constant * 256/315 * 8/(3 sqrt 3) from the closed-form norms."""
    return constant * 256.0 / 315.0 * 8.0 / (3.0 * np.sqrt(3.0))


def random_c1_bumps(rng: np.random.Generator, count: int, n: int = 4096):
    """Sums of one to three (1 - s^2)^p bumps, p in 2..5, inside [-10, 10]."""
    g = make_grid(-10.0, 10.0, n)
    x = g.xi
    for _ in range(count):
        vals = np.zeros(n)
        for _ in range(int(rng.integers(1, 4))):
            w = rng.uniform(0.3, 3.0)
            c = rng.uniform(-8.0 + w, 8.0 - w)
            a = rng.uniform(-2.0, 2.0)
            p = int(rng.integers(2, 6))
            s = (x - c) / w
            vals += a * np.where(np.abs(s) < 1.0, (1.0 - s * s) ** p, 0.0)
        yield g.with_values(vals)


def b2_worst_ratio(rng: np.random.Generator, count: int = 200, n: int = 4096,
                   constant: float = VALID_CUBE_CONSTANT) -> float:
    """Largest lhs/rhs over random bumps; <= 1 means the bound held on all."""
    worst = 0.0
    for g in random_c1_bumps(rng, count, n):
        lhs, rhs = cube_sup_bound(g, constant)
        if lhs > 0:
            worst = max(worst, lhs / rhs)
    return worst


def run_audits(seed: int = 0, gammas=(1.0, 2.0, 3.0)) -> list[AuditLine]:
    lines = []
    for gm in gammas:
        m = float(b1_margin_grid(GammaLaw(gm)).min())
        lines.append(AuditLine(f"B.1 margin, gamma={gm:g}", m >= -1e-12,
                               f"min margin {m:.3e} over 100x100 grid, beta in (0, 10]"))
    neg = float(b1_margin_grid(GammaLaw(2.0), beta_lo=-0.9).min())
    lines.append(AuditLine("B.1 outside its hypothesis (beta < 0 allowed)", neg >= -1e-12,
                           f"min margin {neg:.3e}; negative beta breaks the claim"))
    worst = b2_worst_ratio(np.random.default_rng(seed))
    lines.append(AuditLine("B.2 with constant 3/2", worst <= 1.0,
                           f"max lhs/rhs {worst:.4f} over 200 random C1 bumps"))
    lhs, rhs = quartic_counterexample()
    lines.append(AuditLine("B.2 printed constant 3/4 on (1-x^2)^2", lhs <= rhs,
                           f"lhs {lhs:.4f} vs rhs {rhs:.4f} (exact {quartic_exact_rhs(0.75):.4f})"))
    lhs, rhs = quartic_counterexample(constant=VALID_CUBE_CONSTANT)
    lines.append(AuditLine("B.2 constant 3/2 on (1-x^2)^2", lhs <= rhs,
                           f"lhs {lhs:.4f} vs rhs {rhs:.4f}"))
    return lines
