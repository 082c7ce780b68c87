import numpy as np
import pytest

from didbounds import PanelDataset, RcsDataset


def make_panel(rows):
    """Build a PanelDataset from (d, s0, s1, y0, y1) tuples; ids auto-assigned.

    Pass None for an outcome that is unobserved (selection indicator 0).
    """
    d, s0, s1, y0, y1 = [], [], [], [], []
    for row in rows:
        d.append(row[0])
        s0.append(row[1])
        s1.append(row[2])
        y0.append(np.nan if row[3] is None else float(row[3]))
        y1.append(np.nan if row[4] is None else float(row[4]))
    ids = [str(i + 1) for i in range(len(rows))]
    return PanelDataset.from_records(ids, d, s0, s1, y0, y1)


def make_rcs(rows):
    """Build an RcsDataset from (t, d, s, y) tuples."""
    t, d, s, y = [], [], [], []
    for row in rows:
        t.append(row[0])
        d.append(row[1])
        s.append(row[2])
        y.append(np.nan if row[3] is None else float(row[3]))
    ids = tuple(str(i + 1) for i in range(len(rows)))
    arr = lambda v, dt: np.asarray(v, dtype=dt)
    return RcsDataset(ids=ids, t=arr(t, np.int8), d=arr(d, np.int8),
                      s=arr(s, np.int8), y=arr(y, np.float64))


@pytest.fixture
def mixed_panel():
    """Small panel exercising every (d, s0, s1) cell with hand-checkable values.

    Treated both-observed delta-Y: [1..5]; control both-observed delta-Y:
    [0, 2, 4]. P[S1=1|S0=1,D=1] = 5/6, P[S1=1|S0=1,D=0] = 3/5. Cell counts
    are chosen so that no trim share lands exactly on an empirical-CDF grid
    point (expected values are then insensitive to float rounding of ratios).
    """
    rows = [
        # d=1, s0=1, s1=1: y1 - y0 = 1..5
        (1, 1, 1, 10.0, 11.0),
        (1, 1, 1, 10.0, 12.0),
        (1, 1, 1, 10.0, 13.0),
        (1, 1, 1, 10.0, 14.0),
        (1, 1, 1, 10.0, 15.0),
        # d=1, s0=1, s1=0 (attriter)
        (1, 1, 0, 9.0, None),
        # d=0, s0=1, s1=1: delta-Y = 0, 2, 4
        (0, 1, 1, 10.0, 10.0),
        (0, 1, 1, 10.0, 12.0),
        (0, 1, 1, 10.0, 14.0),
        # d=0, s0=1, s1=0 (attriters)
        (0, 1, 0, 7.0, None),
        (0, 1, 0, 8.0, None),
        # joiners (s0=0, s1=1) and never-observed
        (1, 0, 1, None, 20.0),
        (1, 0, 1, None, 22.0),
        (1, 0, 1, None, 24.0),
        (1, 0, 0, None, None),
        (0, 0, 1, None, 18.0),
        (0, 0, 0, None, None),
        (0, 0, 0, None, None),
    ]
    return make_panel(rows)
