"""Export datasets, factors and result tables to CSV."""

from collections import OrderedDict

import pandas

FLOAT_FORMAT = "%.17g"

PROVENANCE_FIELDS = ("starter_id", "iterations", "p_disease", "p_subgroup")


def dataframe_to_csv(dataframe, filepath=None):
    """Return the CSV text of a dataframe (floats at full precision), and
    write it to ``filepath`` if provided."""
    text = dataframe.to_csv(index=False, float_format=FLOAT_FORMAT)
    if filepath is not None:
        with open(filepath, "w") as f:
            f.write(text)
    return text


def dataset_to_dataframe(dataset):
    """Return a dataframe with columns id, subgroup, severity, label,
    source, x0...x63."""
    if len(dataset) == 0:
        return pandas.DataFrame(
            columns=["id", "subgroup", "severity", "label", "source"])
    return pandas.DataFrame.from_records(
        [record.to_dict() for record in dataset],
        columns=list(dataset.records[0].to_dict().keys()),
    )


def dataset_to_csv(dataset, filepath=None):
    """Return (and optionally write) the dataset CSV."""
    return dataframe_to_csv(dataset_to_dataframe(dataset), filepath)


def factors_to_dataframe(factors):
    """Return a dataframe with columns id, pigment, lesion, v0...v7."""
    if len(factors) == 0:
        return pandas.DataFrame(columns=["id", "pigment", "lesion"])
    return pandas.DataFrame.from_records(
        [factor.to_dict() for factor in factors],
        columns=list(factors[0].to_dict().keys()),
    )


def factors_to_csv(factors, filepath=None):
    return dataframe_to_csv(factors_to_dataframe(factors), filepath)


def provenance_to_csv(dataset, filepath=None):
    """Return (and optionally write) one row per synthetic record: id,
    starter_id, iterations, p_disease, p_subgroup."""
    rows = [
        OrderedDict([("id", record.id)]
                    + [(field, record.data.get(field)) for field in PROVENANCE_FIELDS])
        for record in dataset
        if record.is_synthetic
    ]
    dataframe = pandas.DataFrame(rows, columns=("id",) + PROVENANCE_FIELDS)
    return dataframe_to_csv(dataframe, filepath)
