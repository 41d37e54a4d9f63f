import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from memcarve import CarveConfig, MemoryDump, PixelFormat, PlacementSpec, synth_dump
from memcarve.extraction import (
    Block,
    RawTile,
    classify_format,
    coalesce,
    extract_tiles,
    is_blank_block,
    split_blocks,
    trim_tile,
)
from memcarve.standin import standin_image


def make_dump(data: bytes) -> MemoryDump:
    return MemoryDump(data, origin="unit")


class TestSplitBlocks:
    def test_exact_division(self, cfg):
        blocks = split_blocks(make_dump(b"\xaa" * 8192), cfg)
        assert len(blocks) == 2
        assert [b.index for b in blocks] == [0, 1]

    def test_remainder_dropped(self, cfg):
        blocks = split_blocks(make_dump(b"\xaa" * 4100), cfg)
        assert len(blocks) == 1
        assert len(blocks[0].data) == 4096

    def test_empty_dump(self, cfg):
        assert split_blocks(make_dump(b""), cfg) == []


class TestIsBlankBlock:
    def test_all_ff(self):
        assert is_blank_block(Block(b"\xff" * 4096, 0))

    def test_all_zero(self):
        assert is_blank_block(Block(b"\x00" * 4096, 0))

    def test_one_other_byte(self):
        assert not is_blank_block(Block(b"\xff" * 4095 + b"\x7a", 0))


class TestCoalesce:
    @staticmethod
    def blocks(pattern: str, size: int = 64) -> list[Block]:
        fills = {"d": b"\x42", "b": b"\xff", "z": b"\x00"}
        return [Block(fills[ch] * size, i) for i, ch in enumerate(pattern)]

    def test_blank_separates(self):
        tiles = coalesce(self.blocks("dbd"))
        assert [(t.dump_offset, len(t.data)) for t in tiles] == [(0, 64), (128, 64)]

    def test_consecutive_merge(self):
        tiles = coalesce(self.blocks("ddd"))
        assert [(t.dump_offset, len(t.data)) for t in tiles] == [(0, 192)]

    def test_all_blank(self):
        assert coalesce(self.blocks("bb")) == []
        assert coalesce(self.blocks("zz")) == []

    def test_index_gap_splits(self):
        blocks = [Block(b"\x42" * 64, 0), Block(b"\x42" * 64, 2)]
        tiles = coalesce(blocks)
        assert [(t.dump_offset, len(t.data)) for t in tiles] == [(0, 64), (128, 64)]


def words_tile(words: np.ndarray, offset: int = 0) -> RawTile:
    return RawTile(np.asarray(words, dtype=np.uint8).tobytes(), offset)


class TestClassifyFormat:
    def test_opaque_alpha_last_is_rgba(self, cfg, rng):
        words = rng.integers(1, 255, size=(256, 4), dtype=np.uint8)
        words[:, 3] = 0xFF
        assert classify_format(words_tile(words), cfg) is PixelFormat.RGBA

    def test_zero_alpha_first_is_argb(self, cfg, rng):
        words = rng.integers(1, 255, size=(256, 4), dtype=np.uint8)
        words[:, 0] = 0x00
        assert classify_format(words_tile(words), cfg) is PixelFormat.ARGB

    def test_uniform_interior_bytes_rejected(self, cfg, rng):
        words = rng.integers(1, 255, size=(256, 4), dtype=np.uint8)
        assert classify_format(words_tile(words), cfg) is None

    def test_tie_prefers_rgba(self, cfg):
        words = np.full((64, 4), 0x80, dtype=np.uint8)
        words[:, 0] = 0xFF
        words[:, 3] = 0xFF
        assert classify_format(words_tile(words), cfg) is PixelFormat.RGBA

    def test_higher_first_fraction_wins_argb(self, cfg, rng):
        words = rng.integers(1, 255, size=(100, 4), dtype=np.uint8)
        words[:, 0] = 0x00                     # p_first = 1.0
        words[: 30, 3] = 0xFF                  # p_last = 0.3 > th but < p_first
        words[30:, 3] = np.arange(70, dtype=np.uint8) % 253 + 1
        assert classify_format(words_tile(words), cfg) is PixelFormat.ARGB

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_true_alpha_channel_always_detected(self, seed):
        # every alpha byte 0x00/0xff and the opposite end below threshold
        cfg = CarveConfig()
        gen = np.random.default_rng(seed)
        words = gen.integers(1, 255, size=(128, 4), dtype=np.uint8)
        fmt = PixelFormat.RGBA if seed % 2 == 0 else PixelFormat.ARGB
        words[:, fmt.alpha_index] = gen.choice([0x00, 0xFF], size=128)
        assert classify_format(words_tile(words), cfg) is fmt


class TestTrimTile:
    def test_blank_borders_stripped(self, rng):
        cfg = CarveConfig(min_tile_pixels=1)
        middle = rng.integers(1, 255, size=(2, 4), dtype=np.uint8)
        words = np.concatenate([np.full((1, 4), 0xFF, np.uint8), middle,
                                np.zeros((1, 4), np.uint8)])
        tile = trim_tile(words_tile(words, offset=64), PixelFormat.RGBA, cfg)
        assert tile is not None
        assert np.array_equal(tile.words, middle)
        assert tile.dump_offset == 64 + 4

    def test_below_min_tile_pixels_rejected(self, rng):
        cfg = CarveConfig(min_tile_pixels=3)
        middle = rng.integers(1, 255, size=(2, 4), dtype=np.uint8)
        words = np.concatenate([np.full((1, 4), 0xFF, np.uint8), middle])
        assert trim_tile(words_tile(words), PixelFormat.RGBA, cfg) is None

    def test_no_blank_borders_identity(self, rng):
        cfg = CarveConfig(min_tile_pixels=1)
        words = rng.integers(1, 255, size=(16, 4), dtype=np.uint8)
        tile = trim_tile(words_tile(words), PixelFormat.RGBA, cfg)
        assert np.array_equal(tile.words, words)
        assert tile.dump_offset == 0

    def test_all_blank_rejected(self, cfg):
        words = np.full((16, 4), 0xFF, dtype=np.uint8)
        assert trim_tile(words_tile(words), PixelFormat.RGBA, cfg) is None

    def test_mixed_blank_words_inside_kept(self, rng):
        # interior all-0xff words (e.g. white pixels) survive trimming
        cfg = CarveConfig(min_tile_pixels=1)
        words = rng.integers(1, 255, size=(9, 4), dtype=np.uint8)
        words[4] = 0xFF
        tile = trim_tile(words_tile(words), PixelFormat.RGBA, cfg)
        assert tile.word_count == 9


class TestExtractTiles:
    def test_fully_initialized_dump_yields_nothing(self, cfg):
        assert extract_tiles(make_dump(b"\xff" * (16 * 4096)), cfg) == []

    def test_embedded_bitmap_found_by_construction(self, cfg):
        image = standin_image(0, width=64, height=48)
        placement = PlacementSpec(image=image, format=PixelFormat.RGBA,
                                  dump_offset=2 * 4096)
        dump, _ = synth_dump([placement], 32 * 4096, cfg=cfg, seed=0)
        tiles = extract_tiles(dump, cfg)
        assert len(tiles) == 1
        assert tiles[0].dump_offset == 2 * 4096
        assert tiles[0].word_count == 64 * 48
        assert tiles[0].format is PixelFormat.RGBA

    def test_junk_block_rejected_image_kept(self, cfg):
        image = standin_image(1, width=64, height=48)
        placement = PlacementSpec(image=image, format=PixelFormat.RGBA,
                                  dump_offset=2 * 4096)
        junk = (20 * 4096, 4096, 7)
        dump, _ = synth_dump([placement], 32 * 4096, junk=[junk], cfg=cfg, seed=0)
        # independent oracle: junk bytes exclude 0x00/0xff entirely, so both
        # alpha-position fractions are exactly zero and the block must reject
        junk_words = np.frombuffer(dump.data[junk[0]:junk[0] + junk[1]],
                                   dtype=np.uint8).reshape(-1, 4)
        for byte_pos in (0, 3):
            col = junk_words[:, byte_pos]
            assert np.count_nonzero((col == 0) | (col == 0xFF)) == 0
        tiles = extract_tiles(dump, cfg)
        assert [t.dump_offset for t in tiles] == [2 * 4096]


# --- invariants -----------------------------------------------------------

def segment_strategy():
    return st.sampled_from(["ff", "zero", "data", "alpha"])


@st.composite
def dump_bytes(draw):
    # random mix of blank, junk and alpha-structured segments, 16-byte blocks
    rng = np.random.default_rng(draw(st.integers(0, 2 ** 32 - 1)))
    chunks = []
    for segment in draw(st.lists(segment_strategy(), min_size=0, max_size=8)):
        length = 16 * int(rng.integers(1, 4))
        if segment == "ff":
            chunks.append(b"\xff" * length)
        elif segment == "zero":
            chunks.append(b"\x00" * length)
        elif segment == "data":
            chunks.append(rng.integers(1, 255, size=length, dtype=np.uint8).tobytes())
        else:
            words = rng.integers(1, 255, size=(length // 4, 4), dtype=np.uint8)
            words[:, 3] = 0xFF
            chunks.append(words.tobytes())
    tail = rng.integers(0, 256, size=int(rng.integers(0, 16)), dtype=np.uint8)
    return b"".join(chunks) + tail.tobytes()


class TestExtractionInvariants:
    @given(dump_bytes())
    @settings(max_examples=60, deadline=None)
    def test_matches_stage_composition(self, data):
        cfg = CarveConfig(block_size=16, min_tile_pixels=2)
        dump = make_dump(data)
        composed = []
        for raw in coalesce(split_blocks(dump, cfg)):
            fmt = classify_format(raw, cfg)
            if fmt is None:
                continue
            tile = trim_tile(raw, fmt, cfg)
            if tile is not None:
                composed.append(tile)
        fast = extract_tiles(dump, cfg)
        assert len(fast) == len(composed)
        for a, b in zip(fast, composed):
            assert a.dump_offset == b.dump_offset
            assert a.format is b.format
            assert np.array_equal(a.words, b.words)

    @given(dump_bytes())
    @settings(max_examples=60, deadline=None)
    def test_tiles_disjoint_ordered_and_within_extent(self, data):
        cfg = CarveConfig(block_size=16, min_tile_pixels=2)
        tiles = extract_tiles(make_dump(data), cfg)
        previous_end = 0
        for tile in tiles:
            assert tile.dump_offset >= previous_end
            previous_end = tile.dump_offset + 4 * tile.word_count
        assert previous_end <= len(data)

    @given(dump_bytes())
    @settings(max_examples=30, deadline=None)
    def test_deterministic(self, data):
        cfg = CarveConfig(block_size=16, min_tile_pixels=2)
        first = extract_tiles(make_dump(data), cfg)
        second = extract_tiles(make_dump(data), cfg)
        assert len(first) == len(second)
        for a, b in zip(first, second):
            assert a.dump_offset == b.dump_offset
            assert np.array_equal(a.words, b.words)

    @given(dump_bytes())
    @settings(max_examples=40, deadline=None)
    def test_block_partition_reconstructs_extent(self, data):
        # blank runs + raw tile ranges + dropped remainder tile the dump
        cfg = CarveConfig(block_size=16, min_tile_pixels=2)
        dump = make_dump(data)
        blocks = split_blocks(dump, cfg)
        raw_tiles = coalesce(blocks)
        covered = []
        for raw in raw_tiles:
            covered.append((raw.dump_offset, raw.dump_offset + len(raw.data)))
        for block in blocks:
            if is_blank_block(block):
                start = block.index * cfg.block_size
                covered.append((start, start + cfg.block_size))
        covered.sort()
        position = 0
        for start, stop in covered:
            assert start == position
            position = stop
        assert position == len(blocks) * cfg.block_size
        assert len(data) - position < cfg.block_size  # dropped remainder
