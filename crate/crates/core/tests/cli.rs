use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn labelforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_labelforge")).args(args).env_remove("LABELFORGE_HOOKS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const SMALL: &str = r#"{"version": 1, "plot_range": [[0, 2], [0, 1]], "size": [200, 100],
 "primitives": [
  {"type": "text", "expr": "Sqrt[x]", "pos": [1, 0.5], "anchor": [0, 1]},
  {"type": "text", "text": "peak", "pos": [0.5, 0.5], "psfrag": {"tag": "pk", "position": "Bl"}}]}"#;

fn small_scene(dir: &Path) -> PathBuf {
    let path = dir.join("small.scene");
    fs::write(&path, SMALL).unwrap();
    path
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn export_defaults_to_scene_basename() {
    let dir = tempfile::tempdir().unwrap();
    let scene = small_scene(dir.path());
    let out = labelforge(&["export", p(&scene)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).trim(), "2 labels, 2 tagged");
    assert_eq!(listing(dir.path()), ["small-psfrag.eps", "small-psfrag.tex", "small.scene"]);
    let tex = fs::read_to_string(dir.path().join("small-psfrag.tex")).unwrap();
    assert!(tex.contains(r"\psfrag{Sqrtx}[tc][tc][1][0]"), "{tex}");
    assert!(tex.contains(r"\psfrag{pk}[Bl][Bl][1][0]"), "{tex}");
}

#[test]
fn export_suffixes_and_basename() {
    let dir = tempfile::tempdir().unwrap();
    let scene = small_scene(dir.path());
    let base = dir.path().join("fig");
    let out = labelforge(&[
        "export",
        p(&scene),
        "--basename",
        p(&base),
        "--tex-suffix",
        ".labels.tex",
        "--eps-suffix",
        ".eps",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(listing(dir.path()), ["fig.eps", "fig.labels.tex", "small.scene"]);
}

#[test]
fn export_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let scene = fixture("ex_auto.scene");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&labelforge(&["export", p(&scene), "--basename", p(&a)])), 0);
    assert_eq!(code(&labelforge(&["export", p(&scene), "--basename", p(&b)])), 0);
    for suffix in ["-psfrag.eps", "-psfrag.tex"] {
        let read = |base: &Path| fs::read(format!("{}{suffix}", base.display())).unwrap();
        assert_eq!(read(&a), read(&b));
    }
    assert_eq!(fs::read(dir.path().join("a-psfrag.tex")).unwrap(), fs::read(fixture("golden/ex_auto-psfrag.tex")).unwrap());
}

#[test]
fn manual_only_mode() {
    let dir = tempfile::tempdir().unwrap();
    let scene = small_scene(dir.path());
    let out = labelforge(&["export", p(&scene), "--no-auto-position"]);
    assert_eq!(stdout(&out).trim(), "2 labels, 1 tagged");
    let tex = fs::read_to_string(dir.path().join("small-psfrag.tex")).unwrap();
    assert!(!tex.contains("Sqrtx"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = dir.path().join("bad.scene");
    fs::write(&bad_json, "{\"version\": 1,").unwrap();
    assert_eq!(code(&labelforge(&["export", p(&bad_json)])), 1);

    let dup = dir.path().join("dup.scene");
    fs::write(
        &dup,
        r#"{"version": 1, "plot_range": [[0, 1], [0, 1]], "size": [10, 10], "primitives": [
          {"type": "text", "text": "a", "pos": [0, 0], "psfrag": {"tag": "t"}},
          {"type": "text", "text": "b", "pos": [1, 1], "psfrag": {"tag": "t"}}]}"#,
    )
    .unwrap();
    let out = labelforge(&["export", p(&dup)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains('t'));

    assert_eq!(code(&labelforge(&["export", p(&dir.path().join("missing.scene"))])), 3);
    assert_eq!(code(&labelforge(&["export"])), 1);
    assert_eq!(code(&labelforge(&["frobnicate"])), 1);
    assert_eq!(code(&labelforge(&["--help"])), 0);
    // Nothing was written by the failing runs.
    assert_eq!(listing(dir.path()), ["bad.scene", "dup.scene"]);
}

#[test]
fn unwritable_output_leaves_no_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let scene = small_scene(dir.path());
    let base = dir.path().join("no/such/dir/fig");
    assert_eq!(code(&labelforge(&["export", p(&scene), "--basename", p(&base)])), 3);
    assert_eq!(listing(dir.path()), ["small.scene"]);
}

#[test]
fn hooks_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let scene = small_scene(dir.path());
    let hooks = dir.path().join("hooks.json");
    fs::write(&hooks, r#"{"version": 1, "math": {"post_replace": [["\\sqrt", "\\surd"]]}}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_labelforge"))
        .args(["export", p(&scene)])
        .env("LABELFORGE_HOOKS", &hooks)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let tex = fs::read_to_string(dir.path().join("small-psfrag.tex")).unwrap();
    assert!(tex.contains(r"\surd{x}"), "{tex}");
}

#[test]
fn inspect_formats() {
    let eps = fixture("ex_fig2.eps");
    let text = stdout(&labelforge(&["inspect", p(&eps)]));
    assert_eq!(text.lines().count(), 15);
    assert_eq!(text.lines().next().unwrap(), "gA  150.000  100.000  0.000  1.000");
    let tsv = stdout(&labelforge(&["inspect", p(&eps), "--format", "tsv"]));
    assert_eq!(tsv.lines().next().unwrap(), "tag\tx\ty\trot\tscale");
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&labelforge(&["inspect", p(&eps), "--format", "json"]))).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 15);
    assert_eq!(json[14]["tag"], "gO");
}

#[test]
fn renumber_keeps_backups_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("auto");
    assert_eq!(code(&labelforge(&["export", p(&fixture("ex_auto.scene")), "--basename", p(&base)])), 0);
    let eps = dir.path().join("auto-psfrag.eps");
    let tex = dir.path().join("auto-psfrag.tex");
    let (eps0, tex0) = (fs::read(&eps).unwrap(), fs::read(&tex).unwrap());

    let out = labelforge(&["renumber", p(&eps), p(&tex)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "13 tags renamed");
    assert_eq!(fs::read(dir.path().join("auto-psfrag.eps.bak")).unwrap(), eps0);
    assert_eq!(fs::read(dir.path().join("auto-psfrag.tex.bak")).unwrap(), tex0);
    let tex1 = fs::read_to_string(&tex).unwrap();
    assert!(tex1.contains(r"\psfrag{a}[tc]") && tex1.contains(r"\psfrag{m}[cr]"), "{tex1}");

    let eps1 = fs::read(&eps).unwrap();
    let out = labelforge(&["renumber", p(&eps), p(&tex)]);
    assert_eq!(stdout(&out).trim(), "0 tags renamed");
    assert_eq!(fs::read(&eps).unwrap(), eps1);
    assert_eq!(fs::read_to_string(&tex).unwrap(), tex1);
}

#[test]
fn renumber_rejects_tags_missing_from_eps() {
    let dir = tempfile::tempdir().unwrap();
    let eps = dir.path().join("f.eps");
    let tex = dir.path().join("f.tex");
    fs::copy(fixture("ex_fig2.eps"), &eps).unwrap();
    fs::write(&tex, "\\psfrag{gA}[bl]{a}\n\\psfrag{nowhere}{b}\n").unwrap();
    let out = labelforge(&["renumber", p(&eps), p(&tex)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere"));
    assert_eq!(listing(dir.path()), ["f.eps", "f.tex"]);
}

#[test]
fn preview_strict_and_lenient() {
    let dir = tempfile::tempdir().unwrap();
    let tex = dir.path().join("partial.tex");
    let full = fs::read_to_string(fixture("fig2.tex")).unwrap();
    fs::write(&tex, full.lines().take(3).collect::<Vec<_>>().join("\n")).unwrap();
    let out_path = dir.path().join("preview.eps");
    let eps = fixture("ex_fig2.eps");

    let strict = labelforge(&["preview", p(&eps), p(&tex), "-o", p(&out_path), "--strict"]);
    assert_eq!(code(&strict), 2);
    assert!(!out_path.exists());

    let lenient = labelforge(&["preview", p(&eps), p(&tex), "-o", p(&out_path)]);
    assert_eq!(code(&lenient), 0);
    assert_eq!(stdout(&lenient).trim(), "3 substituted");
    let bytes = fs::read_to_string(&out_path).unwrap();
    assert_eq!(bytes.lines().nth(1), Some("%%Creator: labelforge-preview"));

    let all = labelforge(&["preview", p(&eps), p(&fixture("fig2.tex")), "-o", p(&out_path), "--strict"]);
    assert_eq!(code(&all), 0);
    assert_eq!(stdout(&all).trim(), "15 substituted");
}

#[test]
fn malformed_eps_is_a_syntax_error() {
    let dir = tempfile::tempdir().unwrap();
    let eps = dir.path().join("bad.eps");
    fs::write(&eps, "%!PS\n0 0 moveto (unterminated show\n").unwrap();
    let out = labelforge(&["inspect", p(&eps)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 16"));
}
