"""Embedded relational table store for the business data.

Plays the DBMS role inside the SUT: serves downtime lookups for the
power-check query and receives production-time updates, stamping every
mutation with an update timestamp from the injected clock so DB-side
latencies are comparable with broker-side ones.

Only WORKPLACE and PRODUCTION_ORDER_LINE need full column fidelity; the
remaining tables carry their keys plus one name column.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    DuplicateKey,
    ReferentialError,
    SchemaError,
    StorageError,
    UnknownKey,
    UnknownTable,
    UnknownWorkplace,
)

# column schemas; header row uses exactly these names
TABLE_COLUMNS = {
    "CUSTOMER": ("c_id", "c_name"),
    "ITEM": ("i_id", "i_name"),
    "ORDER": ("o_id", "o_c_id", "o_name"),
    "ORDER_LINE": ("ol_o_id", "ol_number", "ol_i_id", "ol_name"),
    "PRODUCTION_ORDER": ("po_o_id", "po_ol_number", "po_name"),
    "WORKPLACE": ("wp_id", "wp_name", "wp_downtime_start", "wp_downtime_end"),
    "PRODUCTION_ORDER_LINE": (
        "pol_o_id", "pol_ol_number", "pol_number",
        "pol_workplace_id", "pol_start_ts", "pol_end_ts",
    ),
}

# key column count per table (leading columns form the unique key)
_KEY_WIDTH = {
    "CUSTOMER": 1,
    "ITEM": 1,
    "ORDER": 1,
    "ORDER_LINE": 2,
    "PRODUCTION_ORDER": 2,
    "WORKPLACE": 1,
    "PRODUCTION_ORDER_LINE": 3,
}

# import/export order respecting foreign keys
TABLE_ORDER = (
    "CUSTOMER", "ITEM", "ORDER", "ORDER_LINE",
    "PRODUCTION_ORDER", "WORKPLACE", "PRODUCTION_ORDER_LINE",
)

_INT_COLUMNS = {
    "c_id", "i_id", "o_id", "o_c_id", "ol_o_id", "ol_number", "ol_i_id",
    "po_o_id", "po_ol_number", "wp_id", "wp_downtime_start", "wp_downtime_end",
    "pol_o_id", "pol_ol_number", "pol_number", "pol_workplace_id",
}
_OPT_INT_COLUMNS = {"pol_start_ts", "pol_end_ts"}


@dataclass
class ProductionOrderLineRow:
    pol_o_id: int
    pol_ol_number: int
    pol_number: int
    pol_workplace_id: int
    pol_start_ts: int | None = None
    pol_end_ts: int | None = None
    update_ts: int | None = None  # store-assigned, not part of the CSV schema

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.pol_o_id, self.pol_ol_number, self.pol_number)


class BusinessDb:
    """Seven business tables with referential integrity checks.

    Single writer, multiple readers: all mutations take the db lock.
    Generic tables hold plain dicts keyed by their leading key columns;
    PRODUCTION_ORDER_LINE holds ProductionOrderLineRow objects.
    """

    def __init__(self):
        self._tables: dict[str, dict] = {name: {} for name in TABLE_COLUMNS}
        self._lock = threading.Lock()

    # -- helpers -------------------------------------------------------

    def _table(self, name: str) -> dict:
        if name not in self._tables:
            raise UnknownTable(name)
        return self._tables[name]

    def table_rows(self, name: str) -> list[dict]:
        """Committed rows of `name` as column dicts, in key order."""
        table = self._table(name)
        rows = []
        for key in sorted(table):
            row = table[key]
            if isinstance(row, ProductionOrderLineRow):
                rows.append({
                    "pol_o_id": row.pol_o_id,
                    "pol_ol_number": row.pol_ol_number,
                    "pol_number": row.pol_number,
                    "pol_workplace_id": row.pol_workplace_id,
                    "pol_start_ts": row.pol_start_ts,
                    "pol_end_ts": row.pol_end_ts,
                })
            else:
                rows.append(dict(row))
        return rows

    def production_order_line(self, key) -> ProductionOrderLineRow:
        try:
            return self._tables["PRODUCTION_ORDER_LINE"][tuple(key)]
        except KeyError:
            raise UnknownKey(str(key)) from None

    def _check_references(self, table: str, row: dict) -> None:
        def need(ref_table, key):
            if key not in self._tables[ref_table]:
                raise ReferentialError(
                    f"{table} row references missing {ref_table} key {key}"
                )

        if table == "ORDER":
            need("CUSTOMER", (row["o_c_id"],))
        elif table == "ORDER_LINE":
            need("ORDER", (row["ol_o_id"],))
            need("ITEM", (row["ol_i_id"],))
        elif table == "PRODUCTION_ORDER":
            need("ORDER_LINE", (row["po_o_id"], row["po_ol_number"]))
        elif table == "PRODUCTION_ORDER_LINE":
            need("PRODUCTION_ORDER", (row["pol_o_id"], row["pol_ol_number"]))
            need("WORKPLACE", (row["pol_workplace_id"],))

    @staticmethod
    def _convert(table: str, column: str, raw: str):
        if column in _OPT_INT_COLUMNS:
            return None if raw == "" else int(raw)
        if column in _INT_COLUMNS:
            try:
                return int(raw)
            except ValueError:
                raise SchemaError(
                    f"{table}.{column}: expected integer, got {raw!r}"
                ) from None
        return raw

    # -- operations ----------------------------------------------------

    def import_csv(self, table: str, lines) -> int:
        """Insert rows from CSV lines (header first); atomic per call."""
        columns = TABLE_COLUMNS.get(table)
        if columns is None:
            raise UnknownTable(table)
        lines = [ln.rstrip("\n") for ln in lines if ln.strip() != ""]
        if not lines or tuple(lines[0].split(",")) != columns:
            raise SchemaError(f"{table}: bad or missing header row")
        key_width = _KEY_WIDTH[table]
        staged = {}
        with self._lock:
            existing = self._tables[table]
            for ln in lines[1:]:
                raw = ln.split(",")
                if len(raw) != len(columns):
                    raise SchemaError(
                        f"{table}: expected {len(columns)} fields, got {len(raw)}"
                    )
                row = {c: self._convert(table, c, v) for c, v in zip(columns, raw)}
                key = tuple(row[c] for c in columns[:key_width])
                if key in existing or key in staged:
                    raise DuplicateKey(f"{table} key {key}")
                staged[key] = row
            # validate references before touching the table (atomicity)
            for row in staged.values():
                self._check_references(table, row)
            for key, row in staged.items():
                if table == "PRODUCTION_ORDER_LINE":
                    existing[key] = ProductionOrderLineRow(
                        row["pol_o_id"], row["pol_ol_number"], row["pol_number"],
                        row["pol_workplace_id"], row["pol_start_ts"], row["pol_end_ts"],
                    )
                else:
                    existing[key] = row
        return len(staged)

    def export_csv(self, table: str) -> list[str]:
        """CSV lines (header first) for `table`; inverse of import_csv."""
        columns = TABLE_COLUMNS.get(table)
        if columns is None:
            raise UnknownTable(table)
        out = [",".join(columns)]
        for row in self.table_rows(table):
            out.append(",".join(
                "" if row[c] is None else str(row[c]) for c in columns
            ))
        return out

    def lookup_downtime(self, workplace_id: int) -> tuple[int, int]:
        """Scheduled (start_ms, end_ms) downtime of one workplace; read-only."""
        row = self._tables["WORKPLACE"].get((workplace_id,))
        if row is None:
            raise UnknownWorkplace(str(workplace_id))
        return (row["wp_downtime_start"], row["wp_downtime_end"])

    def workplace_ids(self) -> list[int]:
        return sorted(k[0] for k in self._tables["WORKPLACE"])

    def set_production_time(self, key, is_end: bool, ts: int, clock) -> int:
        """Record an enter/leave timestamp on a production order line.

        is_end=False sets the start column, is_end=True the end column;
        repeated events for the same key overwrite (last writer wins).
        Returns the store-assigned update timestamp, which strictly
        increases per row even under a frozen clock.
        """
        with self._lock:
            row = self.production_order_line(key)
            if is_end:
                row.pol_end_ts = ts
            else:
                row.pol_start_ts = ts
            update_ts = clock.now_ms()
            if row.update_ts is not None and update_ts <= row.update_ts:
                update_ts = row.update_ts + 1
            row.update_ts = update_ts
            return update_ts

    def scan_updates(self, table: str, since_ts: int) -> list[ProductionOrderLineRow]:
        """Rows of `table` with update_ts >= since_ts, in update_ts order."""
        rows = self._table(table)
        hits = [
            r for r in rows.values()
            if isinstance(r, ProductionOrderLineRow)
            and r.update_ts is not None and r.update_ts >= since_ts
        ]
        return sorted(hits, key=lambda r: (r.update_ts, r.key))

    def check_integrity(self) -> None:
        """Full referential re-check; raises ReferentialError on violation."""
        for table in TABLE_ORDER:
            for row in self.table_rows(table):
                self._check_references(table, row)


_UPDATES_FILE = "_update_ts.csv"


def export_to_directory(db: BusinessDb, directory) -> None:
    """Write one CSV per table; update timestamps go to a sidecar file so
    a reloaded db can still serve update scans."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for table in TABLE_ORDER:
        path = directory / f"{table}.csv"
        path.write_text("\n".join(db.export_csv(table)) + "\n", encoding="utf-8")
    updates = ["pol_o_id,pol_ol_number,pol_number,update_ts"]
    pol_table = db._tables["PRODUCTION_ORDER_LINE"]
    for row in (pol_table[k] for k in sorted(pol_table)):
        if row.update_ts is not None:
            updates.append(f"{row.pol_o_id},{row.pol_ol_number},"
                           f"{row.pol_number},{row.update_ts}")
    (directory / _UPDATES_FILE).write_text("\n".join(updates) + "\n",
                                           encoding="utf-8")


def load_from_directory(directory) -> BusinessDb:
    directory = Path(directory)
    db = BusinessDb()
    for table in TABLE_ORDER:
        path = directory / f"{table}.csv"
        if not path.is_file():
            raise StorageError(f"missing table file for {table}: {path}")
        db.import_csv(table, path.read_text(encoding="utf-8").splitlines())
    updates_path = directory / _UPDATES_FILE
    if updates_path.is_file():
        for ln in updates_path.read_text(encoding="utf-8").splitlines()[1:]:
            o, ol, pol, ts = (int(v) for v in ln.split(","))
            db.production_order_line((o, ol, pol)).update_ts = ts
    return db
