from evoastar.rng import SplitMix64


def test_streams_are_deterministic():
    a = SplitMix64(1234)
    b = SplitMix64(1234)
    assert [a.next_u64() for _ in range(100)] == [b.next_u64() for _ in range(100)]


def test_seed_zero_reference_values():
    # frozen first outputs of the splitmix64 stream for seed 0; any change
    # here silently invalidates every shipped instance
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]


def test_randrange_bounds():
    rng = SplitMix64(7)
    draws = [rng.randrange(6) for _ in range(1000)]
    assert all(0 <= d < 6 for d in draws)
    assert set(draws) == set(range(6))


def test_shuffle_is_a_permutation():
    rng = SplitMix64(42)
    items = list(range(20))
    shuffled = list(items)
    rng.shuffle(shuffled)
    assert sorted(shuffled) == items
    assert shuffled != items  # 1 in 20! chance of false alarm
