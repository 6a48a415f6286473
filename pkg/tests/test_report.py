import pytest

from wickfock.report import CertificateReport


def test_make_pass_flag():
    assert CertificateReport.make("a", {"x": 1}, 1e-12, 1e-10).passed
    assert not CertificateReport.make("a", {}, 2e-10, 1e-10).passed
    assert CertificateReport.make("a", {}, -5.0, 0.0).passed


def test_combine_and_leaves():
    p = CertificateReport.make("p", {}, 5e-11, 1e-10, n_probes=3)
    q = CertificateReport.make("q", {}, 2e-8, 1e-8, n_probes=4)
    top = CertificateReport.combine("top", [p, q], {"c": 2.0})
    assert not top.passed and top.worst_residual == pytest.approx(2.0) and top.n_probes == 7
    assert [name for name, _ in top.leaves()] == ["top/p", "top/q"]
    assert "FAIL" in str(top)
