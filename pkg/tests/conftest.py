import hypothesis
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ucqaoa.instance import UcInstance, UnitSpec

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def unit_specs(draw, max_pmax: float = 400.0):
    p_max = draw(st.floats(10.0, max_pmax, allow_nan=False, allow_infinity=False))
    frac = draw(st.floats(0.05, 0.4))
    a = draw(st.floats(0.0, 1200.0))
    b = draw(st.floats(5.0, 30.0))
    c = draw(st.floats(1e-4, 1e-2))
    return UnitSpec(p_min=frac * p_max, p_max=p_max, a=a, b=b, c=c)


@st.composite
def instances(draw, min_units: int = 1, max_units: int = 8):
    units = tuple(draw(st.lists(unit_specs(), min_size=min_units, max_size=max_units)))
    cap = sum(u.p_max for u in units)
    # load above the all-ON minimum and below capacity keeps the draw feasible
    frac = draw(st.floats(0.45, 0.95))
    return UcInstance(units=units, load=frac * cap, name="hyp")
