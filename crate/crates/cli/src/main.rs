//! `pscirc`: command-line front end for intersection matrices of
//! pseudocircle arrangements.

use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use pscirc::analysis::first_non_antipodal_row;
use pscirc::embedding::Direction;
use pscirc::{
    are_isomorphic, canonical_form, census_to_psm, check_consistency, classify_triple,
    enumerate_census_with, inconsistent_triple, is_sphere_embeddable_via_quads, iso_via_quads,
    matrix_from_circles, parse_circles, parse_many, quad_profile, summarize, to_psm, CensusFilter,
    CensusOptions, ConsistencyWitness, EmbeddedGraph, Error, IntersectionMatrix, Label,
    LabelPermutation,
};

/// Header comment on every text output.
const HEADER: &str = "# pscirc 1";
/// Overrides the number of enumeration worker threads.
const SHARDS_ENV: &str = "PSCIRC_SHARDS";

const AFTER_HELP: &str = "\
Input is read from the file arguments or, when none are given, from stdin.
Matrices use the .psm format (`n <count>` followed by `<label>: <entries>`
lines); circles use the .circ format (`<label>: <cx> <cy> <r> [ccw|cw]`).

Exit status:
  0  predicate holds / operation succeeded
  1  predicate fails; a `witness:` line is printed
  2  usage or input error
  3  the two methods of a --both check disagree

Witness lines:
  witness: invalid row=<label> position=<p|-> entry=<±k|-> kind=<kind>
  witness: inconsistent k=<label> j=<label> i=<label> entry=<±i> side-k=<in|out> side-i=<in|out>
  witness: genus <g>
  witness: quad <a> <b> <c> <d>
  witness: curves <label>...      (fewer than four curves)
  witness: not-isomorphic <reason>
  witness: not-antipodal row=<label>

Environment:
  PSCIRC_SHARDS  number of worker threads used by `enumerate`";

#[derive(Parser)]
#[command(name = "pscirc", version, about = "Intersection matrices of pseudocircle arrangements", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Input files (stdin when absent).
    files: Vec<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("method").args(["direct", "quads", "both"])))]
struct Method {
    /// Decide on the whole matrix (default).
    #[arg(long)]
    direct: bool,
    /// Decide from the 4-submatrices.
    #[arg(long)]
    quads: bool,
    /// Run both and compare.
    #[arg(long)]
    both: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the permutation condition.
    Validate(Input),
    /// Check consistency (strict embeddability into some surface).
    Consistency(Input),
    /// Print vertex, edge and face counts and the genus.
    Genus(Input),
    /// List the faces of the cellular embedding.
    Faces(Input),
    /// Decide embeddability into the sphere.
    Sphere {
        #[command(flatten)]
        method: Method,
        #[command(flatten)]
        input: Input,
    },
    /// Decide isomorphism of two matrices (two files or two blocks).
    Iso {
        #[command(flatten)]
        method: Method,
        #[command(flatten)]
        input: Input,
    },
    /// Classify a consistent 3-matrix as alpha, beta, gamma, delta or epsilon.
    Classify3(Input),
    /// Recognize uniform rank-3 oriented matroids.
    Om(Input),
    /// Delete one curve.
    Submatrix {
        #[arg(long, value_name = "LABEL")]
        drop: Label,
        #[command(flatten)]
        input: Input,
    },
    /// Reverse the orientation of one curve.
    Reorient {
        label: Label,
        #[command(flatten)]
        input: Input,
    },
    /// Rename labels; `a:b,c:d`, unmentioned labels stay fixed.
    Relabel {
        perm: String,
        #[command(flatten)]
        input: Input,
    },
    /// Print the canonical form.
    Canonical(Input),
    /// Enumerate all isomorphism classes for small n.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "all")]
        filter: CensusFilter,
        /// Allow n = 5.
        #[arg(long)]
        long_running: bool,
        /// Print a JSON summary instead of the matrices.
        #[arg(long)]
        summary: bool,
    },
    /// Convert a circle arrangement (.circ) into its matrix.
    FromCircles(Input),
    /// Export the embedded graph.
    #[command(group(ArgGroup::new("format").args(["dot", "json"]).required(true)))]
    Export {
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        input: Input,
    },
    /// Print the canonical forms of all 4-submatrices.
    Quads(Input),
}

/// Result of one command: text for stdout and the exit status.
struct Report {
    out: String,
    status: u8,
}

impl Report {
    fn new() -> Report {
        Report {
            out: format!("{HEADER}\n"),
            status: 0,
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    fn fail(&mut self, witness: impl AsRef<str>) {
        self.line(format!("witness: {}", witness.as_ref()));
        self.status = 1;
    }
}

fn read_input(input: &Input) -> Result<Vec<String>, String> {
    if input.files.is_empty() {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("stdin: {e}"))?;
        return Ok(vec![s]);
    }
    input
        .files
        .iter()
        .map(|p| std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display())))
        .collect()
}

fn matrices(input: &Input) -> Result<Vec<IntersectionMatrix>, String> {
    let mut out = Vec::new();
    for text in read_input(input)? {
        out.extend(parse_many(&text).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn one_matrix(input: &Input) -> Result<IntersectionMatrix, String> {
    let mut all = matrices(input)?;
    if all.len() != 1 {
        return Err(format!("expected one matrix, found {}", all.len()));
    }
    Ok(all.remove(0))
}

fn side(b: bool) -> &'static str {
    if b {
        "in"
    } else {
        "out"
    }
}

fn inconsistency(w: &ConsistencyWitness) -> String {
    format!(
        "inconsistent k={} j={} i={} entry={} side-k={} side-i={}",
        w.k,
        w.j,
        w.i,
        w.offending_entry,
        side(w.side_in_row_k),
        side(w.side_in_row_i)
    )
}

fn validate_cmd(input: &Input) -> Result<Report, String> {
    let mut r = Report::new();
    for text in read_input(input)? {
        match parse_many(&text) {
            Ok(ms) => {
                for m in ms {
                    r.line(format!("valid n={}", m.n()));
                }
            }
            Err(Error::Validation(v)) => {
                r.line(format!("invalid: {v}"));
                let kind = format!("{:?}", v.kind);
                r.fail(format!(
                    "invalid row={} position={} entry={} kind={}",
                    v.row,
                    v.position.map_or("-".to_string(), |p| p.to_string()),
                    v.entry.map_or("-".to_string(), |e| e.to_string()),
                    kebab(&kind)
                ));
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(r)
}

fn kebab(camel: &str) -> String {
    let mut s = String::new();
    for (t, c) in camel.chars().enumerate() {
        if c.is_ascii_uppercase() {
            if t > 0 {
                s.push('-');
            }
            s.push(c.to_ascii_lowercase());
        } else {
            s.push(c);
        }
    }
    s
}

fn consistency_cmd(input: &Input) -> Result<Report, String> {
    let m = one_matrix(input)?;
    let mut r = Report::new();
    match check_consistency(&m) {
        pscirc::Consistency::Consistent => r.line("consistent"),
        pscirc::Consistency::Inconsistent(w) => {
            r.line("inconsistent");
            if let Some(t) = inconsistent_triple(&m) {
                r.line(format!("triple {} {} {}", t[0], t[1], t[2]));
            }
            r.fail(inconsistency(&w));
        }
    }
    Ok(r)
}

fn genus_cmd(input: &Input) -> Result<Report, String> {
    let m = one_matrix(input)?;
    let e = pscirc::euler_data(&m);
    let mut r = Report::new();
    r.line(format!("vertices {}", e.vertices));
    r.line(format!("edges {}", e.edges));
    r.line(format!("faces {}", e.faces));
    r.line(format!("euler-characteristic {}", e.euler_characteristic()));
    r.line(format!("genus {}", e.genus));
    Ok(r)
}

fn faces_cmd(input: &Input) -> Result<Report, String> {
    let m = one_matrix(input)?;
    let g = EmbeddedGraph::build(&m);
    let faces = g.trace_faces();
    let mut r = Report::new();
    r.line(format!("faces {}", faces.len()));
    r.line("# dart = <curve>.<edge><f|b>");
    for (t, f) in faces.iter().enumerate() {
        let mut s = format!("face {t} length {}:", f.darts.len());
        for d in &f.darts {
            let dart = g.dart(*d);
            let dir = match dart.direction {
                Direction::Forward => 'f',
                Direction::Backward => 'b',
            };
            let _ = write!(s, " {}.{}{dir}", dart.curve, dart.edge_index);
        }
        r.line(s);
    }
    Ok(r)
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Direct,
    Quads,
    Both,
}

fn mode(m: &Method) -> Mode {
    if m.both {
        Mode::Both
    } else if m.quads {
        Mode::Quads
    } else {
        Mode::Direct
    }
}

fn sphere_cmd(method: &Method, input: &Input) -> Result<Report, String> {
    let m = one_matrix(input)?;
    let mode = mode(method);
    let mut r = Report::new();
    let direct = (mode != Mode::Quads).then(|| pscirc::euler_data(&m).genus);
    let quads = (mode != Mode::Direct).then(|| is_sphere_embeddable_via_quads(&m));
    if let Some(g) = direct {
        r.line(format!(
            "direct: {}",
            if g == 0 {
                "embeddable"
            } else {
                "not embeddable"
            }
        ));
    }
    if let Some(q) = &quads {
        r.line(format!(
            "quads: {}",
            if q.embeddable {
                "embeddable"
            } else {
                "not embeddable"
            }
        ));
    }
    if let (Some(g), Some(q)) = (direct, &quads) {
        if (g == 0) != q.embeddable {
            r.line("agreement: no");
            r.status = 3;
            return Ok(r);
        }
        r.line("agreement: yes");
    }
    if let Some(g) = direct.filter(|g| *g > 0) {
        r.fail(format!("genus {g}"));
    }
    if let Some(w) = quads.as_ref().and_then(|q| q.witness.as_ref()) {
        let labels: Vec<String> = w.iter().map(|l| l.to_string()).collect();
        let tag = if w.len() == 4 { "quad" } else { "curves" };
        r.fail(format!("{tag} {}", labels.join(" ")));
    }
    Ok(r)
}

fn two_matrices(input: &Input) -> Result<(IntersectionMatrix, IntersectionMatrix), String> {
    let mut all = matrices(input)?;
    if all.len() != 2 {
        return Err(format!("expected two matrices, found {}", all.len()));
    }
    let b = all.pop().unwrap();
    let a = all.pop().unwrap();
    Ok((a, b))
}

fn iso_cmd(method: &Method, input: &Input) -> Result<Report, String> {
    let (a, b) = two_matrices(input)?;
    let mode = mode(method);
    let mut r = Report::new();
    let direct = if mode != Mode::Quads {
        Some(are_isomorphic(&a, &b).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let quads = if mode != Mode::Direct {
        if a.n() != b.n() {
            Some(None)
        } else {
            Some(Some(iso_via_quads(&a, &b).map_err(|e| e.to_string())?))
        }
    } else {
        None
    };
    if let Some(d) = direct {
        r.line(format!(
            "direct: {}",
            if d { "isomorphic" } else { "not isomorphic" }
        ));
    }
    let quad_iso = quads
        .as_ref()
        .map(|q| q.as_ref().is_some_and(|q| q.isomorphic));
    if let Some(q) = &quads {
        let verdict = if quad_iso == Some(true) {
            "isomorphic"
        } else {
            "not isomorphic"
        };
        let advisory = q.as_ref().is_some_and(|q| q.advisory);
        r.line(format!(
            "quads: {verdict}{}",
            if advisory {
                " (advisory: inconsistent input)"
            } else {
                ""
            }
        ));
        if let Some(bij) = q.as_ref().and_then(|q| q.bijection.as_ref()) {
            let p = LabelPermutation::new(bij.iter().copied()).map_err(|e| e.to_string())?;
            r.line(format!("bijection {p}"));
        }
    }
    if let (Some(d), Some(q)) = (direct, quad_iso) {
        if d != q {
            r.line("agreement: no");
            r.status = 3;
            return Ok(r);
        }
        r.line("agreement: yes");
    }
    if !direct.or(quad_iso).unwrap_or(false) {
        let reason = if a.n() != b.n() {
            "curve-count".to_string()
        } else if direct.is_some() {
            "canonical-forms-differ".to_string()
        } else {
            "no-quad-bijection".to_string()
        };
        r.fail(format!("not-isomorphic {reason}"));
    }
    Ok(r)
}

fn classify_cmd(input: &Input) -> Result<Report, String> {
    let m = one_matrix(input)?;
    let mut r = Report::new();
    if m.n() != 3 {
        return Err(format!("classify3 needs exactly 3 curves, got {}", m.n()));
    }
    match check_consistency(&m).witness() {
        Some(w) => {
            r.line("inconsistent");
            r.fail(inconsistency(w));
        }
        None => r.line(classify_triple(&m).map_err(|e| e.to_string())?.to_string()),
    }
    Ok(r)
}

fn om_cmd(input: &Input) -> Result<Report, String> {
    let m = one_matrix(input)?;
    let mut r = Report::new();
    if let Some(row) = first_non_antipodal_row(&m) {
        r.line("not an oriented matroid");
        r.fail(format!("not-antipodal row={row}"));
    } else if let Some(w) = check_consistency(&m).witness() {
        r.line("not an oriented matroid");
        r.fail(inconsistency(w));
    } else {
        r.line("uniform oriented matroid");
    }
    Ok(r)
}

fn psm_report(m: &IntersectionMatrix) -> Report {
    Report {
        out: format!("{}\n{}", pscirc::format::PSM_VERSION_COMMENT, to_psm(m)),
        status: 0,
    }
}

fn relabel_cmd(perm: &str, input: &Input) -> Result<Report, String> {
    let m = one_matrix(input)?;
    let given: LabelPermutation = perm.parse().map_err(|e: Error| e.to_string())?;
    let mut pairs: Vec<(Label, Label)> = given.pairs().collect();
    let moved: Vec<Label> = given.domain().collect();
    pairs.extend(
        m.labels()
            .iter()
            .filter(|l| !moved.contains(l))
            .map(|l| (*l, *l)),
    );
    let p = LabelPermutation::new(pairs).map_err(|e| e.to_string())?;
    Ok(psm_report(&m.relabel(&p).map_err(|e| e.to_string())?))
}

fn canonical_cmd(input: &Input) -> Result<Report, String> {
    let m = one_matrix(input)?;
    let form = canonical_form(&m).map_err(|e| e.to_string())?;
    let labelling = pscirc::canonical_labelling(&m).map_err(|e| e.to_string())?;
    let p = LabelPermutation::new(labelling).map_err(|e| e.to_string())?;
    Ok(Report {
        out: format!(
            "{}\n# labelling {p}\n{}",
            pscirc::format::PSM_VERSION_COMMENT,
            form.to_psm()
        ),
        status: 0,
    })
}

fn configure_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var(SHARDS_ENV) {
        let k: usize = v
            .parse()
            .ok()
            .filter(|k| *k > 0)
            .ok_or_else(|| format!("{SHARDS_ENV} must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn enumerate_cmd(
    n: usize,
    filter: CensusFilter,
    long_running: bool,
    summary: bool,
) -> Result<Report, String> {
    configure_threads()?;
    let options = CensusOptions {
        allow_long_running: long_running,
        ..CensusOptions::default()
    };
    let census = enumerate_census_with(n, filter, options).map_err(|e| e.to_string())?;
    let out = if summary {
        let s = summarize(n, filter, &census).map_err(|e| e.to_string())?;
        serde_json::to_string_pretty(&s).map_err(|e| e.to_string())? + "\n"
    } else {
        census_to_psm(n, filter, &census)
    };
    Ok(Report { out, status: 0 })
}

fn from_circles_cmd(input: &Input) -> Result<Report, String> {
    let texts = read_input(input)?;
    if texts.len() != 1 {
        return Err(format!("expected one circle file, found {}", texts.len()));
    }
    let arr = parse_circles(&texts[0]).map_err(|e| e.to_string())?;
    let m = matrix_from_circles(&arr).map_err(|e| e.to_string())?;
    Ok(psm_report(&m))
}

fn export_cmd(dot: bool, input: &Input) -> Result<Report, String> {
    let m = one_matrix(input)?;
    let g = EmbeddedGraph::build(&m);
    let out = if dot {
        g.to_dot()
    } else {
        serde_json::to_string_pretty(&g.to_export()).map_err(|e| e.to_string())? + "\n"
    };
    Ok(Report { out, status: 0 })
}

fn quads_cmd(input: &Input) -> Result<Report, String> {
    let m = one_matrix(input)?;
    let profile = quad_profile(&m).map_err(|e| e.to_string())?;
    let mut r = Report::new();
    for (labels, form) in profile.entries() {
        let l: Vec<String> = labels.iter().map(|x| x.to_string()).collect();
        r.line(format!("{}: {form}", l.join(" ")));
    }
    Ok(r)
}

fn run(cli: &Cli) -> Result<Report, String> {
    match &cli.command {
        Command::Validate(i) => validate_cmd(i),
        Command::Consistency(i) => consistency_cmd(i),
        Command::Genus(i) => genus_cmd(i),
        Command::Faces(i) => faces_cmd(i),
        Command::Sphere { method, input } => sphere_cmd(method, input),
        Command::Iso { method, input } => iso_cmd(method, input),
        Command::Classify3(i) => classify_cmd(i),
        Command::Om(i) => om_cmd(i),
        Command::Submatrix { drop, input } => {
            let m = one_matrix(input)?;
            Ok(psm_report(
                &m.submatrix_delete(*drop).map_err(|e| e.to_string())?,
            ))
        }
        Command::Reorient { label, input } => {
            let m = one_matrix(input)?;
            Ok(psm_report(&m.reorient(*label).map_err(|e| e.to_string())?))
        }
        Command::Relabel { perm, input } => relabel_cmd(perm, input),
        Command::Canonical(i) => canonical_cmd(i),
        Command::Enumerate {
            n,
            filter,
            long_running,
            summary,
        } => enumerate_cmd(*n, *filter, *long_running, *summary),
        Command::FromCircles(i) => from_circles_cmd(i),
        Command::Export { dot, input, .. } => export_cmd(*dot, input),
        Command::Quads(i) => quads_cmd(i),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.out);
            ExitCode::from(report.status)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
