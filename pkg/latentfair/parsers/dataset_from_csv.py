"""Read datasets and factor tables from CSV files."""

import pandas as pd

from ..synthgen import Dataset, FeatureRecord

RECORD_FIELDS = ("id", "subgroup", "severity", "label", "source")


def dataset_from_dataframe(dataframe, name=None, provenance=None):
    """Create a Dataset from a dataframe with columns id, subgroup,
    severity, label, source, x0...

    Parameters
    ----------

    dataframe
      A Pandas dataframe, one row per record.

    name
      Name of the dataset.

    provenance
      Optional dataframe with columns id, starter_id, iterations,
      p_disease, p_subgroup, stored in the ``data`` of the synthetic
      records.
    """
    missing = [f for f in RECORD_FIELDS if f not in dataframe.columns]
    if missing:
        raise ValueError("Dataset table misses the columns %s" % missing)
    x_columns = sorted(
        [c for c in dataframe.columns if c.startswith("x")],
        key=lambda c: int(c[1:]),
    )
    provenance_data = {}
    if provenance is not None:
        provenance_data = {
            int(row["id"]): {k: v for k, v in row.items() if k != "id"}
            for row in provenance.to_dict(orient="records")
        }
    records = [
        FeatureRecord(
            id=row["id"],
            subgroup=row["subgroup"],
            severity=row["severity"],
            label=int(row["label"]),
            source=row["source"],
            x=[row[c] for c in x_columns],
            data=provenance_data.get(int(row["id"])),
        )
        for row in dataframe.to_dict(orient="records")
    ]
    return Dataset(records, name=name)


def dataset_from_csv(filepath, name=None, provenance_filepath=None):
    """Read a dataset CSV (as written by ``dataset_to_csv``)."""
    provenance = None
    if provenance_filepath is not None:
        provenance = pd.read_csv(provenance_filepath)
    return dataset_from_dataframe(
        pd.read_csv(filepath, dtype={"subgroup": str, "source": str}),
        name=name,
        provenance=provenance,
    )


def factors_from_csv(filepath):
    """Return the factors table (id, pigment, lesion, v0..v7) indexed by
    record id."""
    return pd.read_csv(filepath).set_index("id")
