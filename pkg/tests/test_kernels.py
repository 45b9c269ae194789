import os
import subprocess
import sys

import numpy as np
import pytest

from isostab import kernels
from isostab.complex import isotropic_vectors, iu_array
from isostab.forms import HyperbolicSpace
from isostab.groups import count_fixing, elements_fixing, fixing_template, group_order
from isostab.ring import EnumerationCapExceeded, Ring

backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])


@pytest.mark.parametrize("impl", backends)
def test_o11_f3(impl):
    count, idx = kernels.count_isometries(fixing_template(1, 0), 3, 1, limit=10,
                                          impl=kernels.backend(impl))
    assert count == 4
    assert idx.tolist() == [12, 24, 28, 56]


@pytest.mark.parametrize("modulus", [3, 5, 9, 25])
def test_o11_is_two_copies_of_units(modulus):
    ring = Ring(*{3: (3, 1), 5: (5, 1), 9: (3, 2), 25: (5, 2)}[modulus])
    assert group_order(ring, 1) == 2 * len(ring.units())


def test_backends_agree_on_scan_and_extension():
    if len(backends) < 2:
        pytest.skip("compiled backend not built")
    py, cy = kernels.backend("python"), kernels.backend("cython")
    T = fixing_template(2, 1)
    assert kernels.count_isometries(T, 3, 2, limit=50, impl=py)[1].tolist() == \
        kernels.count_isometries(T, 3, 2, limit=50, impl=cy)[1].tolist()
    space = HyperbolicSpace(Ring(3), 3)
    seqs = np.ascontiguousarray(iu_array(space, 1))
    cands = isotropic_vectors(space)
    a = kernels.extend_sequences(seqs, cands, 3, 3, impl=py)
    b = kernels.extend_sequences(seqs, cands, 3, 3, impl=cy)
    assert np.array_equal(a, b) and len(a) == 24960


def test_worker_count_does_not_change_results():
    T = fixing_template(2, 1)
    one = kernels.count_isometries(T, 3, 2, limit=100, workers=1)
    four = kernels.count_isometries(T, 3, 2, limit=100, workers=4)
    assert one[0] == four[0] == 36
    assert np.array_equal(one[1], four[1])


def test_elements_and_caps(F3):
    els = elements_fixing(F3, 2, 2)
    assert len(els) == 3
    assert count_fixing(F3, 2, 1) == 36
    with pytest.raises(EnumerationCapExceeded):
        count_fixing(F3, 2, 0, cap=1000)


def test_pure_fallback_selected_by_environment():
    env = dict(os.environ, ISOSTAB_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from isostab import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
