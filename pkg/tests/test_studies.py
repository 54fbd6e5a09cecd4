import pytest

from linewalk.core.config import load_config
from linewalk.core.errors import LinewalkException, domain_exception
from linewalk.studies.base import FunctionStudy, study
from linewalk.studies.study_registry import StudyError, StudyRegistry, get_global_registry

COMMANDS = {"figure1", "scaling", "limit-compare", "nonexplosion", "conjecture", "oracles", "dump-env"}


def config_for(command, **overrides):
    return load_config(command, overrides={k: str(v) for k, v in overrides.items()}, environ={})

# ==================================
# Registry
# ==================================

def test_discovery_finds_every_command():
    """Each study module registers exactly its command."""
    assert set(get_global_registry().names()) == COMMANDS


def test_unknown_command():
    with pytest.raises(LinewalkException) as exc:
        get_global_registry().get_study("figure2")
    assert exc.value.code == "unknown_command"
    assert "figure1" in exc.value.remedy


def test_duplicate_registration():
    """A name can be registered once unless overridden."""
    registry = StudyRegistry()
    first = FunctionStudy(lambda config: {}, name="scratch", description="first")
    registry.register(first)
    with pytest.raises(StudyError):
        registry.register(FunctionStudy(lambda config: {}, name="scratch", description="second"))
    registry.register(FunctionStudy(lambda config: {}, name="scratch", description="third"), override=True)
    assert registry.get_study("scratch").description == "third"


def test_study_needs_description():
    registry = StudyRegistry()
    with pytest.raises(StudyError):
        registry.register(FunctionStudy(lambda config: {}, name="bare", description=""))

# ==================================
# Execution
# ==================================

async def test_figure1():
    """One 100-jump trajectory with both checks passing."""
    result = await get_global_registry().get_study("figure1").execute(config_for("figure1"))
    assert result.success
    assert result.exit_code == 0
    assert set(result.data["artifacts"]) == {"trajectory.csv", "trajectory.svg", "trajectory.bin"}
    assert result.data["report"]["jumps"] == 100
    assert result.data["report"]["seed"] == 271828
    assert all(check["passed"] for check in result.data["checks"])


def test_dual_use_call():
    """Studies can be called directly for the raw output."""
    output = get_global_registry().get_study("figure1")(config_for("figure1", figure_jumps=10))
    assert output["report"]["jumps"] == 10


async def test_dump_env_rows():
    """2 * window + 1 lines plus a header."""
    result = await get_global_registry().get_study("dump-env").execute(config_for("dump-env", window=4))
    lines = result.data["artifacts"]["environment.csv"].splitlines()
    assert lines[0] == "k,H,V"
    assert len(lines) == 10
    assert lines[1].startswith("-4,")


async def test_oracle_subset():
    """Closed-form checks pass and only the selected sections run."""
    config = config_for("oracles", checks="identities,diffineq")
    result = await get_global_registry().get_study("oracles").execute(config)
    assert result.exit_code == 0
    report = result.data["report"]
    assert "identities" in report and "diffineq" in report and "ratio" not in report
    assert not report["diffineq"]["gap_case"]["passed"]


async def test_nonexplosion_small_grid():
    """A subcritical cell with a few probes never truncates."""
    config = config_for("nonexplosion", alpha_grid=0.9, probes=3)
    result = await get_global_registry().get_study("nonexplosion").execute(config)
    assert result.exit_code == 0
    [check] = result.data["checks"]
    assert check["name"] == "nonexplosion_0.9_0.9" and check["hard"]


async def test_scaling_short_grid_is_soft():
    """Fits over less than two decades are reported but never fail the run."""
    config = config_for("scaling", alpha1=2, alpha2=2, t_grid="16,32,64,128", runs=20)
    result = await get_global_registry().get_study("scaling").execute(config)
    assert result.exit_code == 0
    assert [c["name"] for c in result.data["checks"]] == ["exponent_x1", "exponent_x2"]
    assert not any(c["hard"] for c in result.data["checks"])
    assert result.data["artifacts"]["scaling.csv"].startswith("T,horizon,run,x1,x2")

# ==================================
# Failures
# ==================================

async def test_domain_error_maps_to_usage_exit():
    """A LinewalkException inside a study becomes a failed result with its exit code."""
    @study(name="broken", description="raises")
    def broken(config):
        raise domain_exception("alpha", -1, "alpha > 0")

    result = await broken.execute(config_for("figure1"))
    assert not result.success
    assert result.exit_code == 2
    assert result.metadata["detail"]["error"]["code"] == "domain_error"


async def test_unexpected_error_is_wrapped():
    @study(name="crashing", description="divides by zero")
    def crashing(config):
        return 1 / 0

    result = await crashing.execute(config_for("figure1"))
    assert not result.success
    assert result.metadata["detail"]["error"]["code"] == "study_execution_failed"
