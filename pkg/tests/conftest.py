import pytest

from chartbench import dmap, synth


@pytest.fixture(scope="session")
def default_dataset() -> synth.Dataset:
    """The benchmark's default Swiss roll: N=2000, W=60, H=10, a=1, b=0.5."""
    chart = synth.sample_sheet(2000, 60.0, 10.0, seed=7)
    return synth.roll(chart, synth.SpiralParams(a=1.0, b=0.5))


@pytest.fixture(scope="session")
def small_dataset() -> synth.Dataset:
    chart = synth.sample_sheet(300, 60.0, 10.0, seed=3)
    return synth.roll(chart, synth.SpiralParams(a=1.0, b=0.5))


@pytest.fixture(scope="session")
def small_basis(small_dataset) -> dmap.DiffusionBasis:
    return dmap.fit_diffusion(small_dataset.X, dmap.KernelConfig(), k=24)


@pytest.fixture(scope="session")
def default_basis(default_dataset) -> dmap.DiffusionBasis:
    """Full-depth basis (k = 1025) reused by the heavier checks."""
    return dmap.fit_diffusion(default_dataset.X, dmap.KernelConfig(), k=1025)
