import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sikam import kam, shiftkam


def brute_force_shift_knn(mag, target, candidates, k, delta):
    """Enumerate every (frame, shift), keep the best shift per frame, sort."""
    entries = []
    for c in candidates:
        if c == target:
            continue
        for d in range(-delta, delta + 1):
            shifted = shiftkam.shift_frame(mag[:, c], d)
            dist = float(np.sum((shifted - mag[:, target]) ** 2))
            entries.append((dist, c, d))
    entries.sort()
    out, seen = [], set()
    for _, c, d in entries:
        if c in seen:
            continue
        seen.add(c)
        out.append((c, d))
        if len(out) == k:
            break
    return out


class TestShiftFrame:
    def test_zero_shift_is_identity(self, rng):
        col = rng.random(20)
        np.testing.assert_array_equal(shiftkam.shift_frame(col, 0), col)

    def test_impulse_moves_down_for_positive_shift(self):
        col = np.zeros(16)
        col[10] = 1.0
        shifted = shiftkam.shift_frame(col, 3)
        assert shifted[7] == 1.0 and np.sum(shifted) == 1.0

    def test_inverse_shift_restores_interior(self, rng):
        col = rng.random(32)
        d = 5
        back = shiftkam.shift_frame(shiftkam.shift_frame(col, d), -d)
        np.testing.assert_array_equal(back[d:], col[d:])

    @given(
        arrays(np.float64, (24,), elements=st.floats(0, 10, allow_nan=False)),
        st.integers(-24, 24),
    )
    def test_padding_and_energy(self, col, d):
        shifted = shiftkam.shift_frame(col, d)
        assert shifted.shape == col.shape
        # shifted content is a subset of the original values
        assert np.sum(shifted**2) <= np.sum(col**2) + 1e-9

    def test_shift_beyond_length_rejected(self):
        with pytest.raises(kam.KernelError):
            shiftkam.shift_frame(np.zeros(8), 9)


class TestKnnShiftExhaustive:
    def test_matches_brute_force_oracle(self, rng):
        mag = rng.random((48, 30))
        nset = shiftkam.knn_shift_exhaustive(mag, 5, range(30), 8, 10)
        assert list(nset.neighbors) == brute_force_shift_knn(mag, 5, range(30), 8, 10)

    def test_oracle_over_random_instances(self, rng):
        for _ in range(10):
            f = int(rng.integers(8, 32))
            t = int(rng.integers(6, 18))
            delta = int(rng.integers(0, 6))
            k = int(rng.integers(1, t - 1))
            target = int(rng.integers(0, t))
            mag = rng.random((f, t))
            nset = shiftkam.knn_shift_exhaustive(mag, target, range(t), k, delta)
            assert list(nset.neighbors) == brute_force_shift_knn(
                mag, target, range(t), k, delta
            )

    def test_identical_copies_selected_with_zero_shift(self, rng):
        col = rng.random(32)
        mag = np.tile(col[:, None], (1, 6))
        nset = shiftkam.knn_shift_exhaustive(mag, 0, range(6), 5, 12)
        assert all(s == 0 for _, s in nset.neighbors)
        assert sorted(f for f, _ in nset.neighbors) == [1, 2, 3, 4, 5]

    def test_translated_copy_found_with_aligning_shift(self, rng):
        f = 64
        base = np.zeros(f)
        base[[20, 32, 40]] = [1.0, 0.6, 0.4]
        mag = rng.random((f, 5)) * 0.05
        mag[:, 2] = base
        # candidate 4 holds the same pattern 5 bins higher
        mag[:, 4] = np.roll(base, 5)
        nset = shiftkam.knn_shift_exhaustive(mag, 2, range(5), 1, 12)
        frame, shift = nset.neighbors[0]
        assert frame == 4 and shift == 5

    def test_delta_zero_reduces_to_baseline(self, rng):
        for _ in range(10):
            mag = rng.random((12, 15))
            target = int(rng.integers(0, 15))
            a = kam.knn_baseline(mag, target, range(15), 6)
            b = shiftkam.knn_shift_exhaustive(mag, target, range(15), 6, 0)
            assert a.neighbors == b.neighbors

    @given(arrays(np.float64, (10, 12), elements=st.floats(0, 5, allow_nan=False)))
    def test_delta_zero_reduction_property(self, mag):
        a = kam.knn_baseline(mag, 3, range(12), 4)
        b = shiftkam.knn_shift_exhaustive(mag, 3, range(12), 4, 0)
        assert a.neighbors == b.neighbors

    def test_kth_distance_monotone_in_delta(self, rng):
        mag = rng.random((40, 20))
        target = 7

        def kth_distance(delta):
            nset = shiftkam.knn_shift_exhaustive(mag, target, range(20), 5, delta)
            dists = [
                float(
                    np.sum(
                        (shiftkam.shift_frame(mag[:, f], s) - mag[:, target]) ** 2
                    )
                )
                for f, s in nset.neighbors
            ]
            return max(dists)

        prev = np.inf
        for delta in (0, 2, 5, 10, 20):
            cur = kth_distance(delta)
            assert cur <= prev + 1e-12
            prev = cur

    def test_pool_too_small_rejected(self, rng):
        mag = rng.random((8, 4))
        with pytest.raises(kam.KernelError):
            shiftkam.knn_shift_exhaustive(mag, 0, range(4), 4, 2)


class TestMedianEstimateShifted:
    def test_alias_of_shared_median(self):
        assert shiftkam.median_estimate_shifted is kam.median_estimate

    def test_aligned_copies_reconstruct_clean_column(self, rng):
        f = 48
        clean = np.zeros(f)
        clean[[10, 22, 30]] = [1.0, 0.7, 0.5]
        shifts = [-4, -2, 3, 6, 0]
        mag = np.zeros((f, 6))
        mag[:, 0] = clean + rng.random(f) * 0.5  # corrupted target
        for i, d in enumerate(shifts, start=1):
            # neighbor transposed up by d reads back with shift +d
            mag[:, i] = np.roll(clean, d)
        nset = kam.NeighborSet(
            target=0, neighbors=tuple((i, d) for i, d in enumerate(shifts, start=1))
        )
        est = kam.median_estimate(mag, nset)
        np.testing.assert_allclose(est[8:36], clean[8:36], atol=1e-12)

    def test_single_neighbor_is_shifted_column(self, rng):
        mag = rng.random((16, 3))
        nset = kam.NeighborSet(target=0, neighbors=((2, 2),))
        np.testing.assert_array_equal(
            kam.median_estimate(mag, nset), shiftkam.shift_frame(mag[:, 2], 2)
        )


class TestTranspositionDiscovery:
    def test_kernel_finds_aligning_shifts(self, rng):
        from conftest import make_transposition_suite

        mag, center = make_transposition_suite()
        target = center  # the d=0 frame
        noisy = mag.copy()
        noisy[:, target] += rng.random(mag.shape[0]) * 0.1 * mag[:, target].max()
        k = 10
        nset = shiftkam.knn_shift_exhaustive(
            noisy, target, range(mag.shape[1]), k, 48
        )
        good = 0
        for frame, shift in nset.neighbors:
            d = frame - center  # neighbor transposed up by d bins
            if abs(shift - d) <= 1:
                good += 1
        assert good / k >= 0.9
