"""Registry of the bundled example models.

Every entry pairs a `.exthorntype` model with a runtime scenario file that
configures the companion token emulator, plus the expected search outcome
used by the experiment scripts and the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .engine import SearchBudget
from .model import Model
from .parser import parse_model


class LibraryError(Exception):
    pass


@dataclass(frozen=True)
class LibraryEntry:
    name: str
    expect_attack: bool
    expected_poc_lines: int
    """Distinct generated body lines of the first attack found."""
    required_labels: tuple[str, ...] = ()
    """Clause labels that must appear among the attack's annotated steps."""
    budget: SearchBudget = field(default_factory=SearchBudget)

    def model_text(self) -> str:
        return _read(f"{self.name}.exthorntype")

    def scenario_path(self) -> str:
        return str(resources.files("hornpoc") / "models" / f"{self.name}.scenario")

    def scenario_text(self) -> str:
        return _read(f"{self.name}.scenario")

    def load(self) -> Model:
        result = parse_model(self.model_text(), f"{self.name}.exthorntype", self.name)
        if result.model is None:
            raise LibraryError(f"bundled model {self.name} failed to parse: "
                               f"{result.diagnostics}")
        return result.model


def _read(filename: str) -> str:
    return (resources.files("hornpoc") / "models" / filename).read_text()


ENTRIES: tuple[LibraryEntry, ...] = (
    LibraryEntry("running_example", True, 3, ("put wrapkey", "export wrapped", "decrypt wrap")),
    LibraryEntry("pkcs11_exp1", True, 2, ("wrap", "decrypt")),
    LibraryEntry("pkcs11_exp2", True, 3, ("generate key", "wrap", "decrypt")),
    LibraryEntry("pkcs11_exp3", True, 2, ("wrap", "decrypt")),
    LibraryEntry("pkcs11_exp4", True, 2, ("wrap", "decrypt")),
    LibraryEntry("pkcs11_exp5", True, 2, ("wrap", "decrypt")),
    LibraryEntry("yubihsm2_exp1", True, 2, ("export wrapped", "open wrap")),
    LibraryEntry("yubihsm2_exp2", True, 2, ("export wrapped", "open wrap")),
    LibraryEntry("yubihsm2_exp3", True, 4,
                 ("craft wrap", "import wrapped", "export wrapped", "open wrap")),
    LibraryEntry("yubihsm2_exp4", True, 2, ("export wrapped", "open wrap")),
    LibraryEntry("yubihsm2_exp5", True, 4,
                 ("craft wrap", "import wrapped", "export wrapped", "open wrap")),
    LibraryEntry("yubihsm2_exp6", True, 3,
                 ("put wrap key", "export wrapped", "open wrap")),
    LibraryEntry("yubihsm2_exp7", True, 2, ("export wrapped", "open wrap")),
)


def list_entries() -> tuple[LibraryEntry, ...]:
    return ENTRIES


def get_entry(name: str) -> LibraryEntry:
    for e in ENTRIES:
        if e.name == name:
            return e
    raise LibraryError(f"no bundled model named {name!r}")
