//! Command-line surface and benchmark harness.
//!
//! Four subcommands: `order` (order/factorization report), `decompose`
//! (structural breakdown of a cube-free group), `iso` (isomorphism verdict
//! with exit codes 0 = isomorphic / 1 = non-isomorphic / 2 = invalid input),
//! and `bench` (seeded instance pairs timed under both the structured test
//! and the brute-force oracle, streamed as CSV or JSON records).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouptheory::OrderFactorization;
use crate::iso::{
    cubefree_decomposition, isomorphism_cubefree, isomorphism_document, IsomorphismDocument,
};
use crate::oracle::{
    brute_force_isomorphism_limited, build_catalog, load_catalog, save_catalog, scramble,
    CatalogEntry,
};
use crate::perm::{group_from_json, group_to_json, PermGroup};
use crate::structure::{economical_quotient, frattini, frattini_free_decomposition};

/// Exit code when the groups are isomorphic (or the command succeeded).
pub const EXIT_OK: i32 = 0;
/// Exit code when the groups are proven non-isomorphic.
pub const EXIT_NON_ISO: i32 = 1;
/// Exit code for invalid input: parse failures, non-cube-free orders,
/// or internal failures. Never used for a verdict.
pub const EXIT_INVALID: i32 = 2;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "cubefree",
    version,
    about = "Isomorphism testing and structure analysis for groups of cube-free order"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print a group's order, factorization, and cube-free flag.
    Order {
        /// JSON group file.
        file: PathBuf,
    },
    /// Print the structural decomposition of a cube-free group.
    Decompose {
        /// JSON group file.
        file: PathBuf,
    },
    /// Decide whether two cube-free groups are isomorphic.
    Iso {
        /// JSON group file for the domain group.
        file_g: PathBuf,
        /// JSON group file for the codomain group.
        file_h: PathBuf,
        /// Write the generator mapping document as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Print the verification transcript alongside the verdict.
        #[arg(long)]
        verify: bool,
    },
    /// Generate seeded instance pairs per order and compare the structured
    /// test against the brute-force oracle.
    Bench {
        /// Comma-separated cube-free orders.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<u64>,
        /// Seed for instance generation.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest order on which the brute-force oracle is also run.
        #[arg(long, default_value_t = 2000)]
        oracle_limit: u64,
        /// Skip orders above this bound.
        #[arg(long)]
        max_order: Option<u64>,
        /// Load the catalog from this directory, or build and save it there.
        #[arg(long)]
        catalog_dir: Option<PathBuf>,
        /// Emit records as a JSON array instead of CSV.
        #[arg(long)]
        json: bool,
    },
}

/// Execute a parsed command line, printing to standard output, and return
/// the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match &cli.command {
        Command::Order { file } => report_command(order_report_from_file(file)),
        Command::Decompose { file } => report_command(decompose_report_from_file(file)),
        Command::Iso {
            file_g,
            file_h,
            json,
            verify,
        } => match iso_from_files(file_g, file_h, json.as_deref(), *verify) {
            Ok(outcome) => {
                println!("{}", outcome.report);
                outcome.code
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        },
        Command::Bench {
            orders,
            seed,
            oracle_limit,
            max_order,
            catalog_dir,
            json,
        } => {
            let cfg = BenchConfig {
                orders: orders.clone(),
                seed: *seed,
                oracle_limit: *oracle_limit as u128,
                max_order: *max_order,
                catalog_dir: catalog_dir.clone(),
            };
            match run_bench(&cfg) {
                Ok(records) => {
                    if records.is_empty() {
                        return EXIT_OK;
                    }
                    if *json {
                        println!("{}", render_json(&records));
                    } else {
                        print!("{}", render_csv(&records));
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INVALID
                }
            }
        }
    }
}

fn report_command(report: Result<String>) -> i32 {
    match report {
        Ok(text) => {
            println!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn read_group(path: &Path) -> Result<PermGroup> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::GroupFile(format!("{}: {e}", path.display())))?;
    group_from_json(&text)
}

// ---------------------------------------------------------------------------
// order
// ---------------------------------------------------------------------------

/// "60 = 2^2·3·5" (just "1" for the trivial group).
pub fn format_factorization(n: u128) -> String {
    if n == 1 {
        return "1".into();
    }
    let f = OrderFactorization::of(n);
    let parts: Vec<String> = f
        .factors
        .iter()
        .map(|&(p, e)| {
            if e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect();
    format!("{} = {}", n, parts.join("·"))
}

/// One-line order report: factorization plus the cube-free flag.
pub fn order_report(g: &PermGroup) -> String {
    let f = OrderFactorization::of(g.order());
    let flag = if f.is_cubefree() { "yes" } else { "no" };
    format!("{}, cubefree: {}", format_factorization(g.order()), flag)
}

fn order_report_from_file(path: &Path) -> Result<String> {
    Ok(order_report(&read_group(path)?))
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

/// Multi-line structural report of a cube-free group: the direct factors,
/// the Frattini subgroup of the solvable part, and the complement acting on
/// the socle of the Frattini quotient.
pub fn decompose_report(g: &PermGroup) -> Result<String> {
    let d = cubefree_decomposition(g)?;
    let mut out = String::new();
    writeln!(out, "order: {}", format_factorization(g.order())).unwrap();
    match d.p {
        Some(p) => writeln!(out, "A: order {}, PSL2({})", d.a.order(), p).unwrap(),
        None => writeln!(out, "A: order 1").unwrap(),
    }
    writeln!(out, "L: order {}", d.l.order()).unwrap();
    let phi = frattini(&d.l)?;
    writeln!(out, "Phi(L): order {}", phi.order()).unwrap();
    let l_phi = if phi.order() == 1 {
        d.l.clone()
    } else {
        economical_quotient(&d.l, &phi)?.group().clone()
    };
    writeln!(out, "L/Phi: order {}", l_phi.order()).unwrap();
    let ffd = frattini_free_decomposition(&l_phi)?;
    let join = |ps: &[u64]| {
        ps.iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    writeln!(
        out,
        "socle: B = ({}), C = ({})",
        join(&ffd.b_primes),
        join(&ffd.c_primes)
    )
    .unwrap();
    let frame: Vec<String> = ffd
        .rep
        .frame()
        .iter()
        .map(|&(p, dim)| format!("GL{dim}({p})"))
        .collect();
    write!(out, "K: order {}, GL images: ({})", ffd.k.order(), frame.join(", ")).unwrap();
    Ok(out)
}

fn decompose_report_from_file(path: &Path) -> Result<String> {
    decompose_report(&read_group(path)?)
}

// ---------------------------------------------------------------------------
// iso
// ---------------------------------------------------------------------------

/// Verdict of the `iso` command: exit code, printable report, and the
/// mapping document when the groups are isomorphic.
#[derive(Debug)]
pub struct IsoOutcome {
    pub code: i32,
    pub report: String,
    pub document: Option<IsomorphismDocument>,
}

/// Decide isomorphism and build the printable outcome. Exit code 0 with a
/// verified mapping, 1 for proven non-isomorphism, 2 for invalid input
/// (non-cube-free orders included).
pub fn iso_outcome(g: &PermGroup, h: &PermGroup, verify: bool) -> IsoOutcome {
    match isomorphism_cubefree(g, h) {
        Ok(Some(hom)) => match isomorphism_document(&hom) {
            Ok(doc) => {
                let mut report = String::from("isomorphic");
                for (gen, image) in &doc.generator_images {
                    write!(report, "\n  {gen} -> {image}").unwrap();
                }
                if verify {
                    write!(
                        report,
                        "\nverified: relators checked = {}, bijective = {}",
                        doc.relators_checked, doc.bijective
                    )
                    .unwrap();
                }
                IsoOutcome {
                    code: EXIT_OK,
                    report,
                    document: Some(doc),
                }
            }
            Err(e) => IsoOutcome {
                code: EXIT_INVALID,
                report: format!("error: mapping failed verification: {e}"),
                document: None,
            },
        },
        Ok(None) => IsoOutcome {
            code: EXIT_NON_ISO,
            report: "non-isomorphic".into(),
            document: None,
        },
        Err(e @ Error::NotCubeFree { .. }) => IsoOutcome {
            code: EXIT_INVALID,
            report: format!("error: {e}"),
            document: None,
        },
        Err(e) => IsoOutcome {
            code: EXIT_INVALID,
            report: format!("error: {e}"),
            document: None,
        },
    }
}

fn iso_from_files(
    file_g: &Path,
    file_h: &Path,
    json_out: Option<&Path>,
    verify: bool,
) -> Result<IsoOutcome> {
    let g = read_group(file_g)?;
    let h = read_group(file_h)?;
    let outcome = iso_outcome(&g, &h, verify);
    if let (Some(doc), Some(path)) = (&outcome.document, json_out) {
        std::fs::write(path, doc.to_json()?)
            .map_err(|e| Error::GroupFile(format!("{}: {e}", path.display())))?;
    }
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

/// One timed run of one method on one instance pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchRecord {
    pub order: u64,
    pub degree_g: usize,
    pub degree_h: usize,
    /// "structured" or "oracle".
    pub method: String,
    /// "iso" or "non-iso".
    pub result: String,
    /// Seconds.
    pub wall_time: f64,
    /// For iso results: the mapping passed independent verification (always
    /// required). For non-iso results: the verdict was cross-checked by the
    /// other method or is definitive by completeness of the search.
    pub verified: bool,
    pub seed: u64,
}

/// CSV header matching [`BenchRecord`]'s fields in order.
pub const BENCH_CSV_HEADER: &str = "order,degree_G,degree_H,method,result,wall_time,verified,seed";

impl BenchRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{},{}",
            self.order,
            self.degree_g,
            self.degree_h,
            self.method,
            self.result,
            self.wall_time,
            self.verified,
            self.seed
        )
    }
}

/// Render records as CSV with a header line.
pub fn render_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(BENCH_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// Render records as a JSON array.
pub fn render_json(records: &[BenchRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}

/// Configuration of one benchmark run.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub orders: Vec<u64>,
    pub seed: u64,
    /// Largest order on which the brute-force oracle is also run.
    pub oracle_limit: u128,
    pub max_order: Option<u64>,
    pub catalog_dir: Option<PathBuf>,
}

fn derive_seed(seed: u64, order: u64, salt: u64) -> u64 {
    seed.wrapping_mul(1_000_003)
        .wrapping_add(order.wrapping_mul(1_009))
        .wrapping_add(salt)
}

/// Run the benchmark: for each order, every catalog entry is scrambled into
/// an isomorphic pair and every distinct catalog pair of that order forms a
/// non-isomorphic pair; both methods run where permitted, and a verdict
/// disagreement aborts with a written reproduction bundle.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let wanted: Vec<u64> = cfg
        .orders
        .iter()
        .copied()
        .filter(|&n| cfg.max_order.map_or(true, |mx| n <= mx))
        .collect();
    if wanted.is_empty() {
        return Ok(Vec::new());
    }

    let catalog = load_or_build_catalog(cfg, &wanted)?;
    let mut records = Vec::new();
    for &order in &wanted {
        let entries: Vec<&CatalogEntry> =
            catalog.iter().filter(|e| e.order == order).collect();
        if entries.is_empty() {
            return Err(Error::Internal(format!(
                "catalog has no entries of order {order}"
            )));
        }
        for (i, e) in entries.iter().enumerate() {
            let pair_seed = derive_seed(cfg.seed, order, i as u64);
            let s = scramble(&e.group, pair_seed)?;
            bench_pair(&e.group, &s.group, order, pair_seed, cfg, &mut records)?;
        }
        for i in 0..entries.len() {
            for j in (i + 1)..entries.len() {
                let salt = 1_000 + (i * entries.len() + j) as u64;
                let pair_seed = derive_seed(cfg.seed, order, salt);
                bench_pair(
                    &entries[i].group,
                    &entries[j].group,
                    order,
                    pair_seed,
                    cfg,
                    &mut records,
                )?;
            }
        }
    }
    Ok(records)
}

fn load_or_build_catalog(cfg: &BenchConfig, wanted: &[u64]) -> Result<Vec<CatalogEntry>> {
    let mut catalog = match &cfg.catalog_dir {
        Some(dir) if dir.join("manifest.json").exists() => load_catalog(dir)?,
        Some(dir) => {
            let c = build_catalog(wanted)?;
            save_catalog(dir, &c)?;
            c
        }
        None => build_catalog(wanted)?,
    };
    // A loaded catalog may not cover every requested order; build the rest.
    let missing: Vec<u64> = wanted
        .iter()
        .copied()
        .filter(|&n| !catalog.iter().any(|e| e.order == n))
        .collect();
    if !missing.is_empty() {
        catalog.extend(build_catalog(&missing)?);
    }
    Ok(catalog)
}

fn bench_pair(
    g: &PermGroup,
    h: &PermGroup,
    order: u64,
    pair_seed: u64,
    cfg: &BenchConfig,
    records: &mut Vec<BenchRecord>,
) -> Result<()> {
    // Structured method.
    let t = Instant::now();
    let structured = isomorphism_cubefree(g, h)?;
    let structured_time = t.elapsed().as_secs_f64();
    let (s_result, s_verified) = match &structured {
        Some(hom) => {
            let doc = isomorphism_document(hom)?;
            if !doc.bijective {
                return Err(Error::Internal(
                    "constructed mapping failed the bijectivity check".into(),
                ));
            }
            ("iso", true)
        }
        None => ("non-iso", false),
    };
    let structured_idx = records.len();
    records.push(BenchRecord {
        order,
        degree_g: g.degree(),
        degree_h: h.degree(),
        method: "structured".into(),
        result: s_result.into(),
        wall_time: structured_time,
        verified: s_verified,
        seed: pair_seed,
    });

    // Oracle, when the order is under the cutoff.
    if (order as u128) <= cfg.oracle_limit {
        let t = Instant::now();
        let oracle = brute_force_isomorphism_limited(g, h, cfg.oracle_limit)?;
        let oracle_time = t.elapsed().as_secs_f64();
        let o_result = if oracle.is_some() { "iso" } else { "non-iso" };
        let o_verified = match &oracle {
            Some(hom) => {
                let doc = isomorphism_document(hom)?;
                doc.bijective
            }
            // The backtracking search is complete, so a negative verdict is
            // definitive.
            None => true,
        };
        records.push(BenchRecord {
            order,
            degree_g: g.degree(),
            degree_h: h.degree(),
            method: "oracle".into(),
            result: o_result.into(),
            wall_time: oracle_time,
            verified: o_verified,
            seed: pair_seed,
        });
        if o_result != s_result {
            let bundle = write_mismatch_bundle(g, h, order, pair_seed, cfg)?;
            return Err(Error::Internal(format!(
                "method disagreement at order {order} (seed {pair_seed}): \
                 structured={s_result}, oracle={o_result}; reproduction bundle at {}",
                bundle.display()
            )));
        }
        if s_result == "non-iso" {
            // Cross-checked by the complete oracle.
            records[structured_idx].verified = true;
        }
    }
    Ok(())
}

fn write_mismatch_bundle(
    g: &PermGroup,
    h: &PermGroup,
    order: u64,
    pair_seed: u64,
    cfg: &BenchConfig,
) -> Result<PathBuf> {
    let base = cfg
        .catalog_dir
        .clone()
        .unwrap_or_else(std::env::temp_dir)
        .join(format!("mismatch-{order}-{pair_seed}"));
    std::fs::create_dir_all(&base)
        .map_err(|e| Error::GroupFile(format!("create bundle dir: {e}")))?;
    std::fs::write(base.join("g.json"), group_to_json(g))
        .map_err(|e| Error::GroupFile(format!("write bundle: {e}")))?;
    std::fs::write(base.join("h.json"), group_to_json(h))
        .map_err(|e| Error::GroupFile(format!("write bundle: {e}")))?;
    let note = format!(
        "order: {order}\nseed: {pair_seed}\nrerun: cubefree iso g.json h.json\n"
    );
    std::fs::write(base.join("README.txt"), note)
        .map_err(|e| Error::GroupFile(format!("write bundle: {e}")))?;
    Ok(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;

    fn grp(degree: usize, gens: &[&str]) -> PermGroup {
        let parsed: Vec<Permutation> = gens
            .iter()
            .map(|t| Permutation::parse(t, degree).unwrap())
            .collect();
        PermGroup::new(degree, parsed).unwrap()
    }

    #[test]
    fn order_report_matches_the_documented_format() {
        let a5 = grp(5, &["(1,2,3,4,5)", "(3,4,5)"]);
        assert_eq!(order_report(&a5), "60 = 2^2·3·5, cubefree: yes");
        let s4 = grp(4, &["(1,2,3,4)", "(1,2)"]);
        assert_eq!(order_report(&s4), "24 = 2^3·3, cubefree: no");
        let trivial = PermGroup::trivial(3);
        assert_eq!(order_report(&trivial), "1, cubefree: yes");
    }

    #[test]
    fn decompose_reports_the_direct_factors() {
        // A5 × C3 on 8 points.
        let g = grp(8, &["(1,2,3,4,5)", "(3,4,5)", "(6,7,8)"]);
        let report = decompose_report(&g).unwrap();
        assert!(report.contains("A: order 60, PSL2(5)"), "{report}");
        assert!(report.contains("L: order 3"), "{report}");
    }

    #[test]
    fn decompose_reports_the_frattini_data_of_c12() {
        let c12 = grp(7, &["(1,2,3,4)(5,6,7)"]);
        let report = decompose_report(&c12).unwrap();
        assert!(report.contains("A: order 1"), "{report}");
        assert!(report.contains("Phi(L): order 2"), "{report}");
        assert!(report.contains("L/Phi: order 6"), "{report}");
        assert!(report.contains("K: order 1"), "{report}");
    }

    #[test]
    fn decompose_reports_the_socle_of_a4() {
        let a4 = grp(4, &["(1,2)(3,4)", "(1,2,3)"]);
        let report = decompose_report(&a4).unwrap();
        assert!(report.contains("Phi(L): order 1"), "{report}");
        assert!(report.contains("B = ()"), "{report}");
        assert!(report.contains("C = (2)"), "{report}");
        assert!(report.contains("K: order 3"), "{report}");
        assert!(report.contains("GL2(2)"), "{report}");
    }

    #[test]
    fn decompose_rejects_non_cubefree_input() {
        let s4 = grp(4, &["(1,2,3,4)", "(1,2)"]);
        assert!(matches!(
            decompose_report(&s4),
            Err(Error::NotCubeFree { .. })
        ));
    }

    #[test]
    fn iso_outcome_exit_codes_follow_the_contract() {
        // Two scrambled C30 copies → 0.
        let c30 = grp(10, &["(1,2)(3,4,5)(6,7,8,9,10)"]);
        let s = crate::oracle::scramble(&c30, 7).unwrap();
        let outcome = iso_outcome(&c30, &s.group, true);
        assert_eq!(outcome.code, EXIT_OK);
        assert!(outcome.report.starts_with("isomorphic"), "{}", outcome.report);
        assert!(outcome.document.is_some());

        // C12 vs Dic3 → 1.
        let c12 = grp(7, &["(1,2,3,4)(5,6,7)"]);
        let dic3 = grp(7, &["(1,2,3)", "(2,3)(4,5,6,7)"]);
        let outcome = iso_outcome(&c12, &dic3, false);
        assert_eq!(outcome.code, EXIT_NON_ISO);
        assert_eq!(outcome.report, "non-isomorphic");

        // S4 vs S4 → 2 (not cube-free), never a verdict.
        let s4 = grp(4, &["(1,2,3,4)", "(1,2)"]);
        let outcome = iso_outcome(&s4, &s4, false);
        assert_eq!(outcome.code, EXIT_INVALID);
        assert!(outcome.report.contains("cube-free"), "{}", outcome.report);
    }

    #[test]
    fn iso_writes_a_mapping_document_that_reloads() {
        let dir = std::env::temp_dir().join(format!("iso-doc-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let c30 = grp(10, &["(1,2)(3,4,5)(6,7,8,9,10)"]);
        let s = crate::oracle::scramble(&c30, 3).unwrap();
        let g_path = dir.join("g.json");
        let h_path = dir.join("h.json");
        let doc_path = dir.join("mapping.json");
        std::fs::write(&g_path, group_to_json(&c30)).unwrap();
        std::fs::write(&h_path, group_to_json(&s.group)).unwrap();
        let outcome = iso_from_files(&g_path, &h_path, Some(&doc_path), false).unwrap();
        assert_eq!(outcome.code, EXIT_OK);
        let text = std::fs::read_to_string(&doc_path).unwrap();
        let doc: IsomorphismDocument = serde_json::from_str(&text).unwrap();
        assert!(doc.bijective);
        assert_eq!(doc.domain_order, 30);
        // Every mapped generator must parse and land in the codomain.
        for (gen, image) in &doc.generator_images {
            let x = Permutation::parse(gen, c30.degree()).unwrap();
            let y = Permutation::parse(image, s.group.degree()).unwrap();
            assert!(c30.contains(&x));
            assert!(s.group.contains(&y));
        }
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn bench_methods_agree_and_iso_records_are_verified() {
        let cfg = BenchConfig {
            orders: vec![12, 20],
            seed: 5,
            oracle_limit: 2000,
            max_order: None,
            catalog_dir: None,
        };
        let records = run_bench(&cfg).unwrap();
        assert!(!records.is_empty());
        // Records come in structured/oracle pairs with matching verdicts.
        let structured: Vec<&BenchRecord> =
            records.iter().filter(|r| r.method == "structured").collect();
        let oracle: Vec<&BenchRecord> =
            records.iter().filter(|r| r.method == "oracle").collect();
        assert_eq!(structured.len(), oracle.len());
        for (s, o) in structured.iter().zip(&oracle) {
            assert_eq!(s.result, o.result);
            assert_eq!(s.seed, o.seed);
        }
        for r in &records {
            if r.result == "iso" {
                assert!(r.verified, "iso record must be verified: {r:?}");
            }
        }
        // Both isomorphic (scrambled) and non-isomorphic (distinct catalog)
        // pairs must appear.
        assert!(records.iter().any(|r| r.result == "iso"));
        assert!(records.iter().any(|r| r.result == "non-iso"));
    }

    #[test]
    fn bench_is_deterministic_modulo_wall_time() {
        let cfg = BenchConfig {
            orders: vec![12],
            seed: 9,
            oracle_limit: 2000,
            max_order: None,
            catalog_dir: None,
        };
        let a = run_bench(&cfg).unwrap();
        let b = run_bench(&cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.order, y.order);
            assert_eq!(x.degree_g, y.degree_g);
            assert_eq!(x.degree_h, y.degree_h);
            assert_eq!(x.method, y.method);
            assert_eq!(x.result, y.result);
            assert_eq!(x.verified, y.verified);
            assert_eq!(x.seed, y.seed);
        }
    }

    #[test]
    fn bench_with_no_orders_is_empty_and_ok() {
        let cfg = BenchConfig {
            orders: vec![],
            seed: 1,
            oracle_limit: 2000,
            max_order: None,
            catalog_dir: None,
        };
        assert!(run_bench(&cfg).unwrap().is_empty());
        // max_order filtering can also empty the run.
        let cfg = BenchConfig {
            orders: vec![60],
            seed: 1,
            oracle_limit: 2000,
            max_order: Some(10),
            catalog_dir: None,
        };
        assert!(run_bench(&cfg).unwrap().is_empty());
    }

    #[test]
    fn bench_skips_the_oracle_above_the_cutoff() {
        let cfg = BenchConfig {
            orders: vec![12],
            seed: 2,
            oracle_limit: 6,
            max_order: None,
            catalog_dir: None,
        };
        let records = run_bench(&cfg).unwrap();
        assert!(records.iter().all(|r| r.method == "structured"));
        assert!(records.iter().any(|r| r.result == "iso"));
    }

    #[test]
    fn bench_csv_has_the_documented_columns() {
        let rec = BenchRecord {
            order: 12,
            degree_g: 7,
            degree_h: 7,
            method: "structured".into(),
            result: "iso".into(),
            wall_time: 0.25,
            verified: true,
            seed: 77,
        };
        let csv = render_csv(std::slice::from_ref(&rec));
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "order,degree_G,degree_H,method,result,wall_time,verified,seed"
        );
        assert_eq!(lines.next().unwrap(), "12,7,7,structured,iso,0.250000,true,77");
        let json = render_json(std::slice::from_ref(&rec));
        let parsed: Vec<BenchRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.len(), 1);
        assert_eq!(parsed[0].order, 12);
    }

    #[test]
    fn bench_uses_a_catalog_directory_when_given() {
        let dir = std::env::temp_dir().join(format!("bench-cat-test-{}", std::process::id()));
        let cfg = BenchConfig {
            orders: vec![15],
            seed: 3,
            oracle_limit: 2000,
            max_order: None,
            catalog_dir: Some(dir.clone()),
        };
        let first = run_bench(&cfg).unwrap();
        assert!(dir.join("manifest.json").exists());
        let second = run_bench(&cfg).unwrap();
        std::fs::remove_dir_all(&dir).unwrap();
        assert_eq!(first.len(), second.len());
        for (x, y) in first.iter().zip(&second) {
            assert_eq!(x.result, y.result);
            assert_eq!(x.seed, y.seed);
        }
    }
}
