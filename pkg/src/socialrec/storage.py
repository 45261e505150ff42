"""CSV persistence for datasets.

A dataset directory holds three files:

    relationships.csv   user_a,user_b,strength      one row per unordered pair
    ratings.csv         user,item,rating            absent cells have no row
    categories.csv      item,category               rows are the 1-memberships

All files are UTF-8 with LF line endings and display labels ("U1", "I5",
"C3").  Saves are byte-deterministic: rows are sorted by index, so equal
datasets always produce identical files.
"""

import csv
from pathlib import Path

from .model import (
    Dataset,
    ItemCategoryMatrix,
    RatingMatrix,
    RelationshipGraph,
    SocialRecError,
    RATING_MAX,
    RATING_MIN,
    category_label,
    item_label,
    parse_label,
    user_label,
    validate_dataset,
)

RELATIONSHIPS_FILE = "relationships.csv"
RATINGS_FILE = "ratings.csv"
CATEGORIES_FILE = "categories.csv"

_HEADERS = {
    RELATIONSHIPS_FILE: ["user_a", "user_b", "strength"],
    RATINGS_FILE: ["user", "item", "rating"],
    CATEGORIES_FILE: ["item", "category"],
}


class DataFormatError(SocialRecError):
    """A dataset file is missing or malformed; carries file and line context."""

    def __init__(self, file: str, line: int | None, reason: str):
        self.file = file
        self.line = line
        self.reason = reason
        where = f"{file}:{line}" if line is not None else file
        super().__init__(f"{where}: {reason}")


class DatasetValidationError(SocialRecError):
    """Loaded files parse but the assembled dataset breaks an invariant."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


def save_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write the three CSV files for a valid dataset into ``path``.

    The directory is created if needed.  Raises ValueError if the dataset
    fails validation (save never persists a broken dataset).
    """
    problems = validate_dataset(dataset)
    if problems:
        raise ValueError("refusing to save invalid dataset: " + "; ".join(problems))

    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)

    edge_rows = [
        [user_label(a), user_label(b), str(s)]
        for (a, b), s in sorted(dataset.graph.canonical_edges().items())
    ]
    rating_rows = [
        [user_label(u), item_label(i), str(r)]
        for u, i, r in dataset.ratings.cells()
    ]
    category_rows = [
        [item_label(i), category_label(c)]
        for i, c in dataset.categories.members()
    ]

    for name, rows in [
        (RELATIONSHIPS_FILE, edge_rows),
        (RATINGS_FILE, rating_rows),
        (CATEGORIES_FILE, category_rows),
    ]:
        with open(directory / name, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(_HEADERS[name])
            writer.writerows(rows)


def load_dataset(path: str | Path, *, n_users: int | None = None,
                 n_items: int | None = None,
                 n_categories: int | None = None) -> Dataset:
    """Read a dataset directory written by :func:`save_dataset`.

    Dimensions default to one past the highest index mentioned in any file;
    pass them explicitly when trailing users/items/categories appear in no
    row (an all-zero final category column, for instance, is otherwise
    indistinguishable from a dataset with one fewer category).

    Raises DataFormatError for a missing file or malformed row (with file
    and line number) and DatasetValidationError if the assembled dataset
    fails validation.  Row order within the files never affects the result.
    """
    directory = Path(path)

    edges = _read_relationships(directory)
    cells = _read_ratings(directory)
    members = _read_categories(directory)

    max_user = max(
        [x for pair in edges for x in pair] + [u for u, _ in cells],
        default=-1,
    )
    max_item = max(
        [i for _, i in cells] + [i for i, _ in members],
        default=-1,
    )
    max_category = max([c for _, c in members], default=-1)

    n_users = n_users if n_users is not None else max_user + 1
    n_items = n_items if n_items is not None else max_item + 1
    n_categories = n_categories if n_categories is not None else max_category + 1

    dataset = Dataset(
        graph=RelationshipGraph(n_users, edges),
        ratings=RatingMatrix(n_users, n_items, cells),
        categories=ItemCategoryMatrix(n_items, n_categories, set(members)),
        meta={"path": str(directory)},
    )
    problems = validate_dataset(dataset)
    if problems:
        raise DatasetValidationError(problems)
    return dataset


def _read_rows(directory: Path, name: str) -> list[tuple[int, list[str]]]:
    """Rows of one CSV as (line_number, fields), header checked and skipped."""
    file_path = directory / name
    if not file_path.is_file():
        raise DataFormatError(name, None, "file not found")
    with open(file_path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        rows = [(line, row) for line, row in enumerate(reader, start=1)]
    if not rows:
        raise DataFormatError(name, 1, "missing header")
    header_line, header = rows[0]
    if header != _HEADERS[name]:
        raise DataFormatError(name, header_line,
                              f"expected header {','.join(_HEADERS[name])!r}, "
                              f"got {','.join(header)!r}")
    for line, row in rows[1:]:
        if len(row) != len(_HEADERS[name]):
            raise DataFormatError(name, line,
                                  f"expected {len(_HEADERS[name])} fields, got {len(row)}")
    return rows[1:]


def _parse_index(name: str, line: int, token: str, kind: str) -> int:
    try:
        return parse_label(token, kind)
    except ValueError as exc:
        raise DataFormatError(name, line, str(exc)) from None


def _parse_level(name: str, line: int, token: str, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise DataFormatError(name, line, f"{what} {token!r} is not an integer") from None
    if not RATING_MIN <= value <= RATING_MAX:
        raise DataFormatError(name, line,
                              f"{what} {value} outside {RATING_MIN}..{RATING_MAX}")
    return value


def _read_relationships(directory: Path) -> dict[tuple[int, int], int]:
    name = RELATIONSHIPS_FILE
    edges: dict[tuple[int, int], int] = {}
    first_line: dict[tuple[int, int], int] = {}
    for line, (a_token, b_token, s_token) in _read_rows(directory, name):
        a = _parse_index(name, line, a_token, "U")
        b = _parse_index(name, line, b_token, "U")
        strength = _parse_level(name, line, s_token, "strength")
        if a == b:
            raise DataFormatError(name, line, f"self-edge on {a_token.strip()}")
        key = (min(a, b), max(a, b))
        if key in edges:
            pair = f"{user_label(key[0])}/{user_label(key[1])}"
            if edges[key] != strength:
                raise DataFormatError(
                    name, line,
                    f"conflicting strengths for pair {pair}: {edges[key]} on line "
                    f"{first_line[key]}, {strength} here")
            raise DataFormatError(
                name, line, f"duplicate row for pair {pair} (first on line {first_line[key]})")
        edges[key] = strength
        first_line[key] = line
    return edges


def _read_ratings(directory: Path) -> dict[tuple[int, int], int]:
    name = RATINGS_FILE
    cells: dict[tuple[int, int], int] = {}
    first_line: dict[tuple[int, int], int] = {}
    for line, (u_token, i_token, r_token) in _read_rows(directory, name):
        user = _parse_index(name, line, u_token, "U")
        item = _parse_index(name, line, i_token, "I")
        rating = _parse_level(name, line, r_token, "rating")
        key = (user, item)
        if key in cells:
            raise DataFormatError(
                name, line,
                f"duplicate rating for ({user_label(user)}, {item_label(item)}) "
                f"(first on line {first_line[key]})")
        cells[key] = rating
        first_line[key] = line
    return cells


def _read_categories(directory: Path) -> list[tuple[int, int]]:
    name = CATEGORIES_FILE
    members: dict[tuple[int, int], int] = {}
    for line, (i_token, c_token) in _read_rows(directory, name):
        item = _parse_index(name, line, i_token, "I")
        category = _parse_index(name, line, c_token, "C")
        key = (item, category)
        if key in members:
            raise DataFormatError(
                name, line,
                f"duplicate membership ({item_label(item)}, {category_label(category)}) "
                f"(first on line {members[key]})")
        members[key] = line
    return list(members)
