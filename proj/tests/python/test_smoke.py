"""Smoke tests for the roptd extension module."""

import os
import sys

import roptd


def config_path(name):
    base = os.environ.get("ROPTD_CONFIG_DIR", "configs")
    return os.path.join(base, name)


def main():
    cfg = config_path("example3.cfg")

    report = roptd.solve(cfg)
    assert report["converged"] is True, report
    assert report["max_d"] <= 1e-8, report["max_d"]
    assert len(report["weights"]) == 101
    assert abs(sum(report["weights"]) - 1.0) < 1e-12
    assert len(report["support"]) == 3
    doses = sorted(p["point"][0] for p in report["support"])
    assert doses == [1.0, 4.0, 100.0], doses

    check = roptd.verify(cfg, report["weights"])
    assert check["verified"] is True, check
    assert check["max_d"] <= 1e-8
    assert len(check["d"]) == 101
    assert max(check["d"]) <= 1e-8

    points = roptd.grid_points(cfg)
    assert len(points) == 101
    assert points[0] == [0.0]
    assert points[-1] == [100.0]

    design = roptd.round_design(cfg, report["weights"], 20)
    assert sum(row["count"] for row in design) == 20
    counts = {row["point"][0]: row["count"] for row in design}
    assert counts == {1.0: 5, 4.0: 4, 100.0: 11}, counts

    d = roptd.d_values(cfg, report["weights"])
    assert len(d) == 101
    assert max(d) <= 1e-8

    try:
        roptd.solve(config_path("no_such_file.cfg"))
    except roptd.ConfigError:
        pass
    else:
        raise AssertionError("missing config should raise ConfigError")

    print("python smoke: all checks passed")


if __name__ == "__main__":
    main()
