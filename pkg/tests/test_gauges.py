import numpy as np
import pytest
from scipy import stats

from radregion.errors import ImageTooSmallWarning
from radregion.imaging.gauges import (
    GaugePlacement,
    apply_gauge_plan,
    default_templates,
    insert_gauges,
    load_assets,
    write_assets,
)
from radregion.imaging.profiles import IDENTITY, PRETRAIN


class TestTemplates:
    def test_six_templates(self):
        templates = default_templates()
        assert len(templates) == 6
        assert sorted({t.diameter for t in templates}) == [24, 36, 48]

    def test_alpha_only_inside_circle(self):
        for t in default_templates():
            d = t.diameter
            yy, xx = np.mgrid[:d, :d]
            rr = (xx - d / 2 + 0.5) ** 2 + (yy - d / 2 + 0.5) ** 2
            outside = rr > (d / 2) ** 2
            assert float(t.alpha[outside].max(initial=0.0)) == 0.0
            assert float(t.alpha.max()) > 0.5

    def test_asset_roundtrip(self, tmp_path):
        write_assets(tmp_path)
        loaded = load_assets(tmp_path)
        assert len(loaded) == 6
        originals = default_templates()
        # 8-bit PNG quantization only
        assert float(np.abs(loaded[0].patch - originals[0].patch).max()) <= 1 / 255


class TestInsertGauges:
    def test_zero_prob_identity(self, rng):
        img = rng.uniform(0, 0.8, (64, 64)).astype(np.float32)
        out = insert_gauges(img, np.random.default_rng(0), IDENTITY)
        assert np.array_equal(out, img)

    def test_opaque_blend_equals_template(self):
        img = np.zeros((80, 80), dtype=np.float32)
        t = default_templates()[2]
        plan = [GaugePlacement(2, 1.0, 1.0, 10, 12)]
        out = apply_gauge_plan(img, plan)
        region = out[12 : 12 + t.diameter, 10 : 10 + t.diameter]
        full = t.alpha == 1.0
        assert full.sum() > 0
        assert np.allclose(region[full], t.patch[full])

    def test_count_distribution_uniform(self):
        img = np.zeros((64, 64), dtype=np.float32)
        rng = np.random.default_rng(42)
        counts = np.zeros(3, dtype=int)
        n = 30_000
        for _ in range(n):
            _, plan = insert_gauges(img, rng, PRETRAIN, return_plan=True)
            counts[len(plan)] += 1
        freq = counts / n
        assert np.abs(freq - 1 / 3).max() <= 0.01
        chi2 = stats.chisquare(counts).pvalue
        assert chi2 > 0.01

    def test_too_small_image_skips(self):
        img = np.zeros((16, 16), dtype=np.float32)
        rng = np.random.default_rng(1)
        with pytest.warns(ImageTooSmallWarning):
            for _ in range(30):
                out = insert_gauges(img, rng, PRETRAIN)
        assert out.shape == (16, 16)

    def test_gauges_fully_inside(self):
        img = np.zeros((64, 64), dtype=np.float32)
        rng = np.random.default_rng(5)
        for _ in range(300):
            _, plan = insert_gauges(img, rng, PRETRAIN, return_plan=True)
            for g in plan:
                size = int(round(default_templates()[g.template_index].diameter * g.scale))
                assert 0 <= g.x and g.x + size <= 64
                assert 0 <= g.y and g.y + size <= 64
