import csv
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from engdyn import cli
from engdyn.svgplot import fit_overlay_svg, scatter_svg

SPEC_OBJ = {
    "seed": 11,
    "topics": [
        {"topic_id": "fast", "alpha_true": 0.05, "beta_true": 200.0,
         "horizon_days": 1400.0, "n_posts": 220, "lh_target": -0.5,
         "categories": ["Politics", "Social"]},
        {"topic_id": "slow", "alpha_true": 0.004, "beta_true": 800.0,
         "horizon_days": 1400.0, "n_posts": 260, "lh_target": 0.7,
         "categories": ["Health", "Politics"]},
        {"topic_id": "mid", "alpha_true": 0.01, "beta_true": 500.0,
         "horizon_days": 1400.0, "n_posts": 240, "lh_target": 0.1,
         "categories": ["Social", "Health"]},
    ],
}

LONELY_POST = json.dumps({
    "post_id": "only", "topic_id": "lonely",
    "timestamp": "2018-06-01T00:00:00Z",
    "likes": 3, "shares": 0, "comments": 1, "love": 0, "angry": 0,
})


def write_spec(tmp_path, obj=SPEC_OBJ):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(obj))
    return path


def simulate(tmp_path, out="corpus"):
    spec = write_spec(tmp_path)
    out_dir = tmp_path / out
    code = cli.main(["simulate", "--input", str(spec), "--out", str(out_dir)])
    assert code == 0
    return out_dir


def read_tree(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


class TestSimulate:
    def test_emits_expected_topics(self, tmp_path):
        out = simulate(tmp_path)
        lines = (out / "posts.jsonl").read_text().splitlines()
        assert len(lines) == 220 + 260 + 240
        cats = (out / "categories.csv").read_text().splitlines()
        assert cats[0] == "topic_id,category"
        assert "fast,Politics" in cats and "slow,Health" in cats

    def test_same_seed_same_bytes(self, tmp_path):
        a = simulate(tmp_path, "one")
        b = simulate(tmp_path, "two")
        assert read_tree(a) == read_tree(b)

    def test_invalid_spec_exits_two(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"topics": [{"topic_id": "x"}]}))
        assert cli.main(["simulate", "--input", str(bad),
                         "--out", str(tmp_path / "o")]) == 2

    def test_duplicate_topics_exit_two(self, tmp_path):
        obj = {"topics": [
            {"topic_id": "d", "alpha_true": 0.01, "beta_true": 1.0,
             "horizon_days": 10.0, "n_posts": 5},
            {"topic_id": "d", "alpha_true": 0.01, "beta_true": 1.0,
             "horizon_days": 10.0, "n_posts": 5},
        ]}
        spec = write_spec(tmp_path, obj)
        assert cli.main(["simulate", "--input", str(spec),
                         "--out", str(tmp_path / "o")]) == 2

    def test_missing_input_exits_two(self, tmp_path):
        assert cli.main(["simulate", "--input", str(tmp_path / "nope.json"),
                         "--out", str(tmp_path / "o")]) == 2


class TestAnalyze:
    def test_full_run_outputs(self, tmp_path):
        corpus = simulate(tmp_path)
        out = tmp_path / "run"
        code = cli.main([
            "analyze", "--input", str(corpus / "posts.jsonl"),
            "--categories", str(corpus / "categories.csv"),
            "--out", str(out), "--plots"])
        assert code == 0
        with open(out / "fits.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["topic_id", "alpha", "beta", "se_alpha", "se_beta",
                           "rss", "n_points", "converged", "iterations"]
        assert len(rows) == 4  # three topics + header
        with open(out / "metrics.csv") as fh:
            header = fh.readline().strip()
        assert header == ("topic_id,speed_index,lh_score,lh_mode,"
                          "total_love,total_angry,n_posts")
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_fitted"] == 3
        assert summary["skipped"] == {}
        correlations = json.loads((out / "correlations.json").read_text())
        assert correlations["all"]["n"] == 3
        cats_csv = (out / "category_summary.csv").read_text().splitlines()
        assert cats_csv[0] == ("category,alpha_mean,alpha_sd,beta_mean,"
                               "beta_sd,si_mean,si_sd")
        for svg in (out / "plots").glob("*.svg"):
            ET.fromstring(svg.read_text())  # well-formed XML

    def test_single_post_topic_skipped(self, tmp_path):
        corpus = simulate(tmp_path)
        posts = corpus / "posts.jsonl"
        posts.write_text(posts.read_text() + LONELY_POST + "\n")
        out = tmp_path / "run"
        code = cli.main(["analyze", "--input", str(posts),
                         "--out", str(out)])
        assert code == 1  # partial: one topic skipped
        summary = json.loads((out / "summary.json").read_text())
        assert summary["skipped"] == {"lonely": "InsufficientData"}

    def test_matrices_shape_for_three_categories(self, tmp_path):
        corpus = simulate(tmp_path)
        # three topics with two categories each: every category holds 2 topics
        out = tmp_path / "run"
        code = cli.main([
            "analyze", "--input", str(corpus / "posts.jsonl"),
            "--categories", str(corpus / "categories.csv"),
            "--out", str(out)])
        assert code == 0
        for name in ("alpha", "beta", "speed_index", "love_hate"):
            with open(out / "matrices" / f"{name}.csv") as fh:
                rows = list(csv.reader(fh))
            # canonical label order, not alphabetical
            assert rows[0][1:] == ["Politics", "Social", "Health"]
            assert rows[1][1] == ""  # empty diagonal
            assert rows[1][2] == rows[2][1]  # symmetric
            summary = json.loads(
                (out / "matrices" / f"{name}_summary.json").read_text())
            assert set(summary) == {"metric", "n_pairs", "threshold",
                                    "frac_significant"}
            assert summary["n_pairs"] == 3
            assert summary["threshold"] == pytest.approx(0.05 / 3)

    def test_no_valid_posts_exits_two(self, tmp_path):
        bad = tmp_path / "posts.jsonl"
        bad.write_text("not json\n")
        assert cli.main(["analyze", "--input", str(bad),
                         "--out", str(tmp_path / "o")]) == 2

    def test_bad_alpha_level_exits_two(self, tmp_path):
        corpus = simulate(tmp_path)
        assert cli.main(["analyze", "--input", str(corpus / "posts.jsonl"),
                         "--out", str(tmp_path / "o"),
                         "--alpha-level", "1.5"]) == 2

    def test_fifty_topic_corpus(self, tmp_path):
        from engdyn.synth import default_corpus_specs, generate_corpus
        specs, cats = default_corpus_specs(50, seed=4, n_posts=(150, 400))
        posts = tmp_path / "posts.jsonl"
        categories = tmp_path / "categories.csv"
        generate_corpus(specs, cats, posts, categories)
        out = tmp_path / "run"
        assert cli.main(["analyze", "--input", str(posts),
                         "--categories", str(categories),
                         "--out", str(out)]) == 0
        with open(out / "fits.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 50
        assert sum(1 for r in rows if r["converged"] == "true") >= 45
        correlations = json.loads((out / "correlations.json").read_text())
        assert correlations["all"]["n"] == 50
        assert any("rho" in v for v in correlations["by_category"].values())

    def test_lh_mean_mode_flag(self, tmp_path):
        corpus = simulate(tmp_path)
        out = tmp_path / "run"
        assert cli.main(["analyze", "--input", str(corpus / "posts.jsonl"),
                         "--out", str(out), "--lh-mode", "mean"]) == 0
        with open(out / "metrics.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert all(row["lh_mode"] == "mean_of_posts" for row in rows)

    def test_bin_width_flag_coarsens_series(self, tmp_path):
        corpus = simulate(tmp_path)
        narrow = tmp_path / "daily"
        wide = tmp_path / "weekly"
        for out, width in ((narrow, "1"), (wide, "7")):
            assert cli.main(["analyze", "--input", str(corpus / "posts.jsonl"),
                             "--out", str(out),
                             "--bin-width-days", width]) == 0
        def points(path):
            with open(path / "fits.csv") as fh:
                return {r["topic_id"]: int(r["n_points"])
                        for r in csv.DictReader(fh)}
        daily, weekly = points(narrow), points(wide)
        assert all(weekly[t] < daily[t] for t in daily)

    def test_zero_reaction_corpus_degrades_gracefully(self, tmp_path):
        from engdyn.synth import SynthSpec, generate_corpus
        specs = [SynthSpec(f"t{i}", 0.01, 300.0, 900.0, 120,
                           reaction_rate=0.0, noise_seed=i) for i in range(3)]
        posts = tmp_path / "posts.jsonl"
        generate_corpus(specs, {}, posts, tmp_path / "cats.csv")
        out = tmp_path / "run"
        assert cli.main(["analyze", "--input", str(posts),
                         "--out", str(out)]) == 0
        correlations = json.loads((out / "correlations.json").read_text())
        assert "error" in correlations["all"]  # no defined sentiment scores
        with open(out / "metrics.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert all(row["lh_score"] == "" for row in rows)

    def test_rejected_lines_counted(self, tmp_path):
        corpus = simulate(tmp_path)
        posts = corpus / "posts.jsonl"
        posts.write_text(posts.read_text() + "garbage\n")
        out = tmp_path / "run"
        assert cli.main(["analyze", "--input", str(posts),
                         "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_rejected_lines"] == 1


ARTICLES = []
for i in range(6):
    ARTICLES.append({"article_id": f"econ{i}",
                     "text": "market trade economy inflation bank growth "
                             "market trade economy"})
for i in range(6):
    ARTICLES.append({"article_id": f"sport{i}",
                     "text": "match goal team league player coach "
                             "match goal team"})
ARTICLES[0]["text"] += " team"  # one weak cross-link


class TestExtractTopics:
    def write_articles(self, tmp_path, rows=None):
        path = tmp_path / "articles.jsonl"
        rows = ARTICLES if rows is None else rows
        path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        return path

    def test_planted_clusters_recovered(self, tmp_path):
        arts = self.write_articles(tmp_path)
        out = tmp_path / "topics"
        code = cli.main(["extract-topics", "--input", str(arts),
                         "--out", str(out), "--seed", "1"])
        assert code == 0
        with open(out / "partition.csv") as fh:
            rows = list(csv.reader(fh))[1:]
        communities = {}
        for term, cid in rows:
            communities.setdefault(cid, set()).add(term)
        assert len(communities) >= 2
        # the two planted vocabularies end up in different communities
        by_term = {term: cid for term, cid in rows}
        assert by_term["economy"] != by_term["goal"]
        assert by_term["market"] == by_term["inflation"]
        assert by_term["team"] == by_term["league"]

    def test_same_seed_byte_identical(self, tmp_path):
        arts = self.write_articles(tmp_path)
        outs = []
        for name in ("t1", "t2"):
            out = tmp_path / name
            assert cli.main(["extract-topics", "--input", str(arts),
                             "--out", str(out), "--seed", "9"]) == 0
            outs.append(read_tree(out))
        assert outs[0] == outs[1]

    def test_empty_corpus_exits_two(self, tmp_path, capsys):
        path = tmp_path / "articles.jsonl"
        path.write_text("")
        code = cli.main(["extract-topics", "--input", str(path),
                         "--out", str(tmp_path / "o")])
        assert code == 2
        assert "empty corpus" in capsys.readouterr().err

    def test_stopword_only_corpus_exits_two(self, tmp_path):
        rows = [{"article_id": "a", "text": "the and of 123"}]
        path = self.write_articles(tmp_path, rows)
        assert cli.main(["extract-topics", "--input", str(path),
                         "--out", str(tmp_path / "o")]) == 2

    def test_pretokenized_articles(self, tmp_path):
        rows = [{"article_id": "a", "terms": ["Alpha", "beta", "alpha"]},
                {"article_id": "b", "terms": ["beta", "gamma"]}]
        path = self.write_articles(tmp_path, rows)
        out = tmp_path / "o"
        assert cli.main(["extract-topics", "--input", str(path),
                         "--out", str(out)]) == 0
        edges = (out / "edges.csv").read_text()
        assert "alpha,beta,1" in edges
        assert "beta,gamma,1" in edges

    def test_missing_input_exits_two(self, tmp_path):
        assert cli.main(["extract-topics", "--input", str(tmp_path / "x"),
                         "--out", str(tmp_path / "o")]) == 2


class TestSvg:
    def test_fit_overlay_well_formed(self):
        svg = fit_overlay_svg([0.0, 1.0, 2.0, 3.0], [0.1, 0.3, 0.8, 1.0],
                              alpha=1.0, beta=1.5, title="demo")
        root = ET.fromstring(svg)
        assert root.tag.endswith("svg")

    def test_scatter_well_formed(self):
        svg = scatter_svg([0.1, 0.5, 0.9], [-0.5, 0.0, 0.7],
                          "x", "y", "demo")
        ET.fromstring(svg)
