import os
import tempfile
import typing

import pandas as pd


def atomic_write_text(path: str, text: str):
    """ write to a temp file in the target directory, then rename over path """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', newline='') as file:
            file.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def write_frame(frame: pd.DataFrame, path: str):
    atomic_write_text(path, frame.to_csv(index=False, lineterminator='\n'))


def transform_displayed_info(info: dict) -> str:
    return "\n".join([f"{k}: {v}" for k, v in info.items()])


def get_column_from_list(columns: typing.Iterable[str], aliases: typing.Iterable[str]) -> typing.Optional[str]:
    """ first alias present among columns, compared case-insensitively """
    lookup = {str(c).strip().lower(): c for c in columns}
    for a in aliases:
        found = lookup.get(a.strip().lower())
        if found is not None:
            return found
    return None
