import importlib.util
from pathlib import Path


def test_kernel_benchmark_runs(capsys):
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert mod.main(["--sizes", "8", "16", "--primes", "2", "7", "--repeat", "1"]) == 0
    assert "rank" in capsys.readouterr().out
