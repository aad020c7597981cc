import sys

import numpy as np
import pytest

from mdcompact.scheme import make_coefficients


def cyclic_matrices(n, coeffs, backward=False):
    """Dense implicit (left) and explicit (right) matrices of the defining relation."""
    a, c, d = coeffs.a, coeffs.c, coeffs.diagonal
    b, e, f = coeffs.b, coeffs.e, coeffs.f
    lhs = np.zeros((n, n))
    rhs = np.zeros((n, n))
    for i in range(n):
        up, down = (i + 1) % n, (i - 1) % n
        lhs[i, i] += d
        if backward:
            lhs[i, up] += c
            lhs[i, down] += a
            rhs[i, up] += f
            rhs[i, i] += e
            rhs[i, down] -= b
        else:
            lhs[i, up] += a
            lhs[i, down] += c
            rhs[i, up] += b
            rhs[i, i] -= e
            rhs[i, down] -= f
    return lhs, rhs


def dense_derivative(u, h, coeffs, backward=False):
    lhs, rhs = cyclic_matrices(len(u), coeffs, backward)
    return np.linalg.solve(lhs, rhs @ np.asarray(u) / h)


@pytest.fixture(params=[4, 6], ids=["order4", "order6"])
def coeffs(request):
    return make_coefficients(request.param)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = module.pytest_terminal_summary_lines() if module else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
