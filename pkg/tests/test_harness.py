import subprocess
import sys

import numpy as np
import pytest

from cfmimo.config import SystemConfig
from cfmimo.errors import CfmimoError
from cfmimo.harness import (emit_cdf, percentile, read_cdf_csv, run_experiment,
                            simulate_drop, summarize)


def tiny_cfg(**over):
    base = dict(area_side=300.0, n_aps=4, n_gues=3, n_uavs=2,
                n_ap_antennas=2, tau_c=20, tau_p=4, rng_seed=3)
    base.update(over)
    return SystemConfig(**base)


class TestPercentile:
    def test_median(self):
        assert percentile([3.0, 1.0, 2.0], 0.5) == 2.0

    def test_endpoints(self):
        s = np.arange(10.0)
        assert percentile(s, 0.0) == 0.0
        assert percentile(s, 1.0) == 9.0

    def test_interpolates(self):
        assert percentile([0.0, 1.0], 0.25) == pytest.approx(0.25)

    def test_empty_rejected(self):
        with pytest.raises(CfmimoError):
            percentile([], 0.5)

    def test_out_of_range_q(self):
        with pytest.raises(CfmimoError):
            percentile([1.0], 1.5)


class TestSimulateDrop:
    def test_report_shapes_and_sanity(self):
        cfg = tiny_cfg()
        rep = simulate_drop(cfg, np.random.default_rng(0), 8)
        for arr in (rep.se_lb_dl, rep.se_ub_dl, rep.se_lb_ul, rep.se_ub_ul):
            assert arr.shape == (5,)
            assert np.all(np.isfinite(arr)) and np.all(arr >= 0)
        # rates are SE times bandwidth
        assert np.allclose(rep.rate_lb_dl, rep.se_lb_dl * cfg.bandwidth)


class TestRunExperiment:
    def test_shapes_and_populations(self):
        cfg = tiny_cfg()
        res = run_experiment(cfg, n_drops=2, n_fading_trials=4)
        assert res.rate_lb_dl.shape == (2, 5)
        assert res.samples("gue", "dl", "lb").size == 2 * 3
        assert res.samples("uav", "ul", "ub").size == 2 * 2
        for pop in ("gue", "uav"):
            s = res.samples(pop, "dl", "lb")
            assert np.all(np.diff(s) >= 0)

    def test_deterministic_given_seed(self):
        cfg = tiny_cfg()
        r1 = run_experiment(cfg, 2, 4)
        r2 = run_experiment(tiny_cfg(), 2, 4)
        assert np.array_equal(r1.rate_lb_dl, r2.rate_lb_dl)
        assert np.array_equal(r1.rate_ub_ul, r2.rate_ub_ul)

    def test_seed_changes_output(self):
        r1 = run_experiment(tiny_cfg(), 2, 4)
        r2 = run_experiment(tiny_cfg(rng_seed=4), 2, 4)
        assert not np.array_equal(r1.rate_lb_dl, r2.rate_lb_dl)

    def test_invalid_counts(self):
        with pytest.raises(CfmimoError):
            run_experiment(tiny_cfg(), 0, 4)
        with pytest.raises(CfmimoError):
            run_experiment(tiny_cfg(), 1, 0)


class TestEmitCdf:
    def test_files_and_round_trip(self, tmp_path):
        res = run_experiment(tiny_cfg(), 2, 4)
        files = emit_cdf(res, tmp_path)
        assert len(files) == 8 + 1   # 2 pops x 2 dirs x 2 bounds + summary
        rates, cdf = read_cdf_csv(tmp_path / "gue_dl_lb.csv")
        assert rates.size == 6
        assert np.all(np.diff(rates) >= 0)
        assert np.all(np.diff(cdf) > 0)
        assert cdf[-1] == 1.0
        # CSV keeps 12 significant digits
        assert np.allclose(rates, res.samples("gue", "dl", "lb"), rtol=1e-11)

    def test_summary_rows(self, tmp_path):
        res = run_experiment(tiny_cfg(), 2, 4)
        emit_cdf(res, tmp_path)
        rows = summarize(tmp_path)
        assert len(rows) == 8
        row = [r for r in rows if r["population"] == "uav"
               and r["direction"] == "ul" and r["bound"] == "lb"][0]
        assert int(row["n_samples"]) == 4
        s = res.samples("uav", "ul", "lb")
        assert float(row["rate_p50_bps"]) == pytest.approx(percentile(s, 0.5))

    def test_empty_population_noted(self, tmp_path):
        res = run_experiment(tiny_cfg(n_uavs=0, n_gues=4), 1, 4)
        emit_cdf(res, tmp_path)
        rows = summarize(tmp_path)
        uav_rows = [r for r in rows if r["population"] == "uav"]
        assert all(int(r["n_samples"]) == 0 for r in uav_rows)
        assert not (tmp_path / "uav_dl_lb.csv").exists()

    def test_byte_identical_reruns(self, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        emit_cdf(run_experiment(tiny_cfg(), 2, 4), d1)
        emit_cdf(run_experiment(tiny_cfg(), 2, 4), d2)
        for name in ("gue_dl_lb.csv", "uav_ul_ub.csv", "summary.csv"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()

    def test_bad_header_rejected(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("rate,cdf\n1,0.5\n")
        with pytest.raises(CfmimoError):
            read_cdf_csv(p)


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "cfmimo.cli", *args],
                          capture_output=True, text=True)


class TestCli:
    def test_run_and_summarize(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        tiny_cfg().to_json(cfg_path)
        out = tmp_path / "out"
        r = run_cli("run", "--config", str(cfg_path), "--drops", "1",
                    "--fading-trials", "4", "--seed", "9", "--out", str(out))
        assert r.returncode == 0, r.stderr
        assert (out / "summary.csv").exists()
        s = run_cli("summarize", "--in", str(out))
        assert s.returncode == 0
        assert "rate_p50_bps" in s.stdout
        assert "uav" in s.stdout

    def test_seed_flag_overrides_config(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        tiny_cfg().to_json(cfg_path)
        outs = []
        for seed in ("5", "6"):
            out = tmp_path / seed
            r = run_cli("run", "--config", str(cfg_path), "--drops", "1",
                        "--fading-trials", "4", "--seed", seed,
                        "--out", str(out))
            assert r.returncode == 0, r.stderr
            outs.append((out / "gue_dl_lb.csv").read_bytes())
        assert outs[0] != outs[1]

    def test_bad_config_exits_2(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text('{"n_apps": 5}')
        r = run_cli("run", "--config", str(cfg_path), "--out",
                    str(tmp_path / "o"))
        assert r.returncode == 2
        assert r.stderr.startswith("ERROR ConfigurationError:")

    def test_missing_config_exits_3(self, tmp_path):
        r = run_cli("run", "--config", str(tmp_path / "nope.json"),
                    "--out", str(tmp_path / "o"))
        assert r.returncode == 3
        assert r.stderr.startswith("ERROR IOError:")

    def test_summarize_missing_dir_exits_3(self, tmp_path):
        r = run_cli("summarize", "--in", str(tmp_path / "nope"))
        assert r.returncode == 3
        assert r.stderr.startswith("ERROR IOError:")
