"""
Nox sessions for testing, linting and documenting groupoid_cocycles.
"""
from pathlib import Path
from shutil import rmtree
from typing import List

import nox
import pkg_resources

PACKAGE_NAME = "groupoid_cocycles"
PYTHON_VERSIONS = ["3.8", "3.9", "3.10"]
DEFAULT_PYTHON_VERSION = "3.8"
COVERAGE_FAIL_UNDER = "70"

DEV_REQUIREMENTS_PATH = Path("requirements.txt")
DOCS_SRC_PATH = Path("docs_src")
DOCS_PATH = Path("docs")
DOCS_REQUIREMENTS_PATH = DOCS_SRC_PATH / "requirements.txt"
DOCS_APIDOC_DIR_PATH = DOCS_SRC_PATH / "apidoc"
COVERAGE_SVG_PATH = DOCS_SRC_PATH / "imgs/coverage.svg"
TESTS_PATH = Path("tests")
PROFILE_SCRIPT_PATH = TESTS_PATH / "_profile.py"

# Instances the verify session runs every command against
SMOKE_INSTANCES = ("pair:3", "transformation:3", "disjoint:2")

VENV_PARAMS = dict(venv_params=["--copies"])


def filter_paths_to_existing(*iterables: Path) -> List[Path]:
    """
    Filter paths to only existing.
    """
    return [path for path in iterables if path.exists()]


def install_dev(session, extras: str = ""):
    """
    Install package and dev dependencies.
    """
    session.install("-r", str(DEV_REQUIREMENTS_PATH))
    session.install(f".{extras}")


def _requirement(package: str) -> str:
    """
    Pinned requirement of package from requirements.txt.
    """
    if not DEV_REQUIREMENTS_PATH.exists():
        raise FileNotFoundError(f"Expected {DEV_REQUIREMENTS_PATH} to exist.")
    matches = [
        str(requirement)
        for requirement in pkg_resources.parse_requirements(
            DEV_REQUIREMENTS_PATH.read_text()
        )
        if str(requirement).startswith(package)
    ]
    if len(matches) != 1:
        raise ValueError(
            f"Expected one {package} in {DEV_REQUIREMENTS_PATH}. Found: {matches}."
        )
    return matches[0]


@nox.session(python=PYTHON_VERSIONS, reuse_venv=True, **VENV_PARAMS)
def tests_pip(session):
    """
    Run pytest with coverage after a pip install.
    """
    install_dev(session=session, extras="[coverage]")
    session.run("coverage", "run", "--source", PACKAGE_NAME, "-m", "pytest")
    session.run("coverage", "report", "--fail-under", COVERAGE_FAIL_UNDER)

    if session.python == DEFAULT_PYTHON_VERSION:
        COVERAGE_SVG_PATH.parent.mkdir(parents=True, exist_ok=True)
        session.run("coverage-badge", "-f", "-o", str(COVERAGE_SVG_PATH))

    session.run("python", "-m", PACKAGE_NAME, "--help")


@nox.session(python=DEFAULT_PYTHON_VERSION, reuse_venv=True, **VENV_PARAMS)
def verify(session):
    """
    Run the full verification suite from the command line on generated
    instances.
    """
    install_dev(session=session)
    for instance in SMOKE_INSTANCES:
        session.run("gpd", "--logging-level", "WARNING", "all", instance)
    session.run(
        "gpd",
        "--logging-level",
        "WARNING",
        "all",
        "transformation:3",
        "--instances",
        "3",
        "--output",
        "text",
    )


@nox.session(python=DEFAULT_PYTHON_VERSION, reuse_venv=True, **VENV_PARAMS)
def lint(session):
    """
    Lint python files and docs_src.
    """
    install_dev(session=session, extras="[lint]")
    existing_paths = filter_paths_to_existing(
        Path(PACKAGE_NAME), TESTS_PATH, Path("noxfile.py"), Path("dodo.py")
    )
    session.run(
        "rstcheck", "-r", str(DOCS_SRC_PATH), "--ignore-directives", "automodule"
    )
    session.run("pylint", *map(str, existing_paths))


@nox.session(python=DEFAULT_PYTHON_VERSION, reuse_venv=True, **VENV_PARAMS)
def typecheck(session):
    """
    Typecheck with mypy.
    """
    install_dev(session=session, extras="[typecheck]")
    session.run("mypy", PACKAGE_NAME)


@nox.session(python=DEFAULT_PYTHON_VERSION, reuse_venv=True, **VENV_PARAMS)
def apidocs(session):
    """
    Regenerate apidoc sources.
    """
    session.install("-r", str(DOCS_REQUIREMENTS_PATH))
    if DOCS_APIDOC_DIR_PATH.exists():
        rmtree(DOCS_APIDOC_DIR_PATH)
    session.run(
        "sphinx-apidoc",
        "-o",
        str(DOCS_APIDOC_DIR_PATH),
        f"./{PACKAGE_NAME}",
        "-e",
        "-f",
    )


@nox.session(python=DEFAULT_PYTHON_VERSION, reuse_venv=True, **VENV_PARAMS)
def docs(session):
    """
    Build html documentation into docs.
    """
    session.install("-r", str(DOCS_REQUIREMENTS_PATH))
    session.run("sphinx-build", str(DOCS_SRC_PATH), str(DOCS_PATH))


@nox.session(reuse_venv=True, **VENV_PARAMS)
def profile_performance(session):
    """
    Profile the verification suite with pyinstrument.
    """
    install_dev(session=session)
    if not PROFILE_SCRIPT_PATH.exists():
        raise FileNotFoundError(f"Expected {PROFILE_SCRIPT_PATH} to exist.")
    save_file = Path(session.create_tmp()) / "profile_runtime.html"
    session.run(
        "pyinstrument",
        "--renderer",
        "html",
        "--outfile",
        str(save_file),
        str(PROFILE_SCRIPT_PATH),
    )
    print(f"\nPerformance profile saved at {save_file.resolve()}.")


@nox.session(python=DEFAULT_PYTHON_VERSION, reuse_venv=True, **VENV_PARAMS)
def pre_commit(session):
    """
    Run pre-commit on all files.
    """
    session.install(_requirement("pre-commit"))
    session.run(
        "pre-commit",
        "run",
        "--all-files",
        env={"PRE_COMMIT_HOME": session.cache_dir / ".pre-commit-cache"},
    )


@nox.session(python=DEFAULT_PYTHON_VERSION, reuse_venv=True, **VENV_PARAMS)
def codespell(session):
    """
    Check spelling in code.
    """
    session.install(_requirement("codespell"))
    session.run("codespell", PACKAGE_NAME, str(TESTS_PATH))
