import numpy as np
import pytest

from sdofdisc import (
    ALL_METHODS,
    Biquad,
    ContractError,
    DiscreteStateSpace,
    MethodId,
    NewmarkParams,
    NigamJenningsCoeffs,
    SdofSystem,
    Signal,
    UnknownMethodError,
    biquad_filter,
    central_difference_tf,
    discretize,
    is_euler,
    nigam_jennings,
    parse_method,
    simulate,
    sinc_resample,
    time_history,
    upsample,
)

from conftest import random_signal, rel_max

SYS = SdofSystem(2 * np.pi, 0.05)
DT = 0.01


class TestParse:
    @pytest.mark.parametrize("name", ALL_METHODS)
    def test_known(self, name):
        assert str(parse_method(name)) == name

    def test_case_and_whitespace(self):
        assert parse_method("  ZOH ").name == "zoh"

    def test_presets(self):
        assert parse_method("newmark-avg").newmark == NewmarkParams(0.5, 0.25)
        assert parse_method("newmark-linear").newmark == NewmarkParams(0.5, 1 / 6)

    def test_custom_newmark(self):
        mid = parse_method("newmark:0.6,0.3")
        assert mid.newmark == NewmarkParams(0.6, 0.3)
        assert mid.family == "newmark"

    @pytest.mark.parametrize("text", ["rk4", "", "newmark:0.5", "newmark:a,b", "newmark:1.5,0.25", "newmark:0.5,0.6"])
    def test_unknown(self, text):
        with pytest.raises(UnknownMethodError):
            parse_method(text)

    def test_passthrough(self):
        mid = MethodId("zoh")
        assert parse_method(mid) is mid

    def test_families(self):
        assert parse_method("zoh").family == "tf"
        assert parse_method("ss-zoh").family == "ss"
        assert parse_method("nigam-jennings").family == "stepper"

    def test_euler(self):
        assert is_euler("fe") and is_euler("ss-be")
        assert not is_euler("tustin")


@pytest.mark.parametrize("name", ALL_METHODS)
def test_every_method_discretizes_and_simulates(name):
    real = discretize(name, SYS, DT, quiet=True)
    assert isinstance(real, (Biquad, DiscreteStateSpace, NigamJenningsCoeffs))
    x = random_signal(41, 500, first_zero=True)
    out = simulate(name, SYS, x, quiet=True)
    assert len(out) == 500 and out.dt == DT
    assert np.all(np.isfinite(out.samples))


@pytest.mark.parametrize("name", [m for m in ALL_METHODS if m not in ("fe", "ss-fe")])
def test_methods_agree_on_slow_input(name):
    # well-resolved input: every consistent method lands near the exact response
    x = Signal(DT, np.sin(0.5 * np.arange(3000) * DT))
    ref = nigam_jennings(SYS, x).displacement.samples
    out = simulate(name, SYS, x, quiet=True).samples
    assert rel_max(out, ref) < 0.05


def test_central_difference_runs_through_biquad():
    x = random_signal(42, 300)
    a = simulate("cd", SYS, x).samples
    b = biquad_filter(central_difference_tf(SYS, DT), x).samples
    np.testing.assert_array_equal(a, b)


def test_velocity_realization():
    d = discretize("ss-zoh", SYS, DT, observe_velocity=True)
    assert d.n_outputs == 2


class TestPipeline:
    def test_upsample_validation(self):
        x = Signal(DT, np.ones(10))
        assert upsample(x, 1, "none") is x
        with pytest.raises(ContractError):
            upsample(x, 2, "none")
        with pytest.raises(ContractError):
            upsample(x, 2, "cubic")
        with pytest.raises(ContractError):
            upsample(x, 0, "sinc")

    def test_output_step(self):
        x = random_signal(43, 200)
        out = time_history("zoh", SYS, x, upsample_factor=4, interp="linear", display_factor=3)
        assert len(out) == 200 * 12
        assert out.dt == pytest.approx(DT / 12)

    def test_display_resampling_is_sinc(self):
        x = random_signal(44, 200)
        coarse = time_history("nigam-jennings", SYS, x, 2, "sinc")
        fine = time_history("nigam-jennings", SYS, x, 2, "sinc", display_factor=5)
        np.testing.assert_array_equal(fine.samples, sinc_resample(coarse, 5).samples)

    def test_bad_display_factor(self):
        with pytest.raises(ContractError):
            time_history("zoh", SYS, random_signal(45, 10), display_factor=1.5)
