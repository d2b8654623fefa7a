"""
doit tasks.

Tasks delegate to nox sessions and depend on the files each session reads.
"""
import re
from pathlib import Path

from doit import task_params
from doit.tools import config_changed

PACKAGE_NAME = "groupoid_cocycles"
UTF8 = "utf-8"
VERSION_PATTERN = r"(^_*version_*\s*[:=]\s\").*\""
ACTIONS = "actions"
FILE_DEP = "file_dep"
TASK_DEP = "task_dep"
TARGETS = "targets"
NAME = "name"
UP_TO_DATE = "uptodate"
PYTHON_VERSIONS = ["3.8", "3.9", "3.10"]
DEFAULT_PYTHON_VERSION = "3.8"

DOCS_SRC_PATH = Path("docs_src")
DOCS_PATH = Path("docs")
DOCS_REQUIREMENTS_PATH = DOCS_SRC_PATH / "requirements.txt"
DOCS_APIDOC_PATH = DOCS_SRC_PATH / "apidoc"
COVERAGE_SVG_PATH = DOCS_SRC_PATH / "imgs/coverage.svg"
README_PATH = Path("README.rst")
DOCS_FILES = [*DOCS_SRC_PATH.rglob("*.rst"), README_PATH]

DEV_REQUIREMENTS_PATH = Path("requirements.txt")
PYPROJECT_PATH = Path("pyproject.toml")
POETRY_LOCK_PATH = Path("poetry.lock")
NOXFILE_PATH = Path("noxfile.py")
TESTS_PATH = Path("tests")
VERSION_PATHS = [Path(PACKAGE_NAME) / "__init__.py", PYPROJECT_PATH]

PYTHON_SRC_FILES = list(Path(PACKAGE_NAME).rglob("*.py"))
PYTHON_TEST_FILES = list(TESTS_PATH.rglob("*.py"))
PYTHON_ALL_FILES = [*PYTHON_SRC_FILES, *PYTHON_TEST_FILES, *Path(".").glob("*.py")]


def resolve_task_name(func) -> str:
    """
    Resolve name of task without ``task_`` prefix.
    """
    return func.__name__.replace("task_", "")


def _nox_task(session: str, file_dep, task_dep=()):
    """
    Task running a single nox session.
    """
    command = f"nox --session {session}"
    return {
        ACTIONS: [command],
        FILE_DEP: [*file_dep, NOXFILE_PATH],
        TASK_DEP: list(task_dep),
        UP_TO_DATE: [config_changed(dict(command=command))],
    }


def task_requirements():
    """
    Sync requirements from poetry.lock.
    """
    command_base = "poetry export --without-hashes --dev {} -o {}"
    for requirements_path, options in zip(
        (DEV_REQUIREMENTS_PATH, DOCS_REQUIREMENTS_PATH), ("", "-E docs")
    ):
        yield {
            NAME: str(requirements_path),
            FILE_DEP: [POETRY_LOCK_PATH, PYPROJECT_PATH],
            ACTIONS: [command_base.format(options, requirements_path)],
            TARGETS: [requirements_path],
            UP_TO_DATE: [config_changed(dict(command_base=command_base))],
        }


def task_pre_commit():
    """
    Run pre-commit.
    """
    return {
        ACTIONS: ["nox --session pre_commit"],
        TASK_DEP: [resolve_task_name(task_requirements)],
    }


def task_lint():
    """
    Lint python files and docs.
    """
    return _nox_task(
        "lint",
        [*PYTHON_ALL_FILES, *DOCS_FILES, DEV_REQUIREMENTS_PATH],
        [resolve_task_name(task_pre_commit)],
    )


def task_ci_test():
    """
    Install with pip, test with pytest and check coverage per python version.
    """
    for python_version in PYTHON_VERSIONS:
        command = f"nox --session tests_pip -p {python_version}"
        yield {
            NAME: python_version,
            FILE_DEP: [*PYTHON_SRC_FILES, *PYTHON_TEST_FILES, DEV_REQUIREMENTS_PATH],
            TASK_DEP: [resolve_task_name(task_pre_commit)],
            ACTIONS: [command],
            UP_TO_DATE: [config_changed(dict(command=command))],
            **(
                {TARGETS: [COVERAGE_SVG_PATH]}
                if python_version == DEFAULT_PYTHON_VERSION
                else dict()
            ),
        }


def task_verify():
    """
    Run every gpd command on generated instances.
    """
    return _nox_task(
        "verify",
        [*PYTHON_SRC_FILES, DEV_REQUIREMENTS_PATH],
        [resolve_task_name(task_ci_test)],
    )


def task_typecheck():
    """
    Typecheck ``groupoid_cocycles`` with ``mypy``.
    """
    return _nox_task(
        "typecheck",
        [*PYTHON_SRC_FILES, DEV_REQUIREMENTS_PATH],
        [resolve_task_name(task_pre_commit)],
    )


def task_docs():
    """
    Make apidoc sources and html documentation.
    """
    sources = [*PYTHON_SRC_FILES, *DOCS_FILES, DOCS_REQUIREMENTS_PATH]
    apidocs = _nox_task("apidocs", sources, [resolve_task_name(task_lint)])
    docs = _nox_task("docs", sources)
    return {
        ACTIONS: [*apidocs[ACTIONS], *docs[ACTIONS]],
        FILE_DEP: apidocs[FILE_DEP],
        TASK_DEP: apidocs[TASK_DEP],
        TARGETS: [DOCS_APIDOC_PATH, DOCS_PATH],
        UP_TO_DATE: [config_changed(dict(command="apidocs+docs"))],
    }


def task_performance_profile():
    """
    Profile the verification suite with ``pyinstrument``.
    """
    return _nox_task(
        "profile_performance",
        [*PYTHON_SRC_FILES, TESTS_PATH / "_profile.py", DEV_REQUIREMENTS_PATH],
    )


def task_codespell():
    """
    Check code spelling.
    """
    return _nox_task(
        "codespell", PYTHON_ALL_FILES, [resolve_task_name(task_pre_commit)]
    )


def task_build():
    """
    Build package with poetry.
    """
    return {
        ACTIONS: ["poetry build"],
    }


def replace_version_string(path: Path, tag: str):
    """
    Replace version strings in the file at path with tag.
    """
    lines = [
        re.sub(VERSION_PATTERN, r"\g<1>" + tag + r'"', line)
        for line in path.read_text(UTF8).splitlines()
    ]
    with path.open("w", newline="\n", encoding=UTF8) as openfile:
        openfile.write("\n".join(lines) + "\n")


def use_tag(tag: str):
    """
    Write tag, without a leading v, as the version in VERSION_PATHS.
    """
    assert len(tag) != 0
    tag = tag[1:] if tag.startswith("v") else tag
    for path in VERSION_PATHS:
        replace_version_string(path=path, tag=tag)
    print(f"Version set to {tag}. Update CHANGELOG.md and tag with:")
    print(f"git tag -a v{tag} -m 'Release {tag}.'")


@task_params([{NAME: "tag", "default": "", "type": str, "long": "tag"}])
def task_tag(tag: str):
    """
    Update version strings to a new tag.
    """
    assert isinstance(tag, str)
    return {
        ACTIONS: [use_tag],
    }


DOIT_CONFIG = {
    "default_tasks": [
        resolve_task_name(task_requirements),
        resolve_task_name(task_pre_commit),
        resolve_task_name(task_lint),
        resolve_task_name(task_ci_test),
        resolve_task_name(task_verify),
        resolve_task_name(task_docs),
        resolve_task_name(task_build),
        resolve_task_name(task_codespell),
    ]
}
