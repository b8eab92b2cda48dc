use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use pcmlab::config::{parse_sa1_file, parse_sa2_file, to_toml, Sa1File, Sa2File};
use pcmlab::io::load_matrix;
use pcmlab::prioritization::estimate;
use pcmlab::simulation::{bin_records, cm_quality_score, run_sa1, run_sa2, MaeColumn, RecordSet, BIN_COUNT};
use pcmlab::validation::golden_checks;
use pcmlab::{
    ConsistencyMeasure, JudgmentScale, OptimizerSettings, Pcm, PcmError, PrioritizationMethod, Reciprocity, Region,
};

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

pub const RECORDS_FILE: &str = "records.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CONFIG_FILE: &str = "config.toml";

fn read_matrix(path: &Path, mode: Option<Reciprocity>, scale: Option<JudgmentScale>) -> CliResult<Pcm> {
    let m = load_matrix(path, mode)?;
    Ok(match (scale, m.mode()) {
        (None, _) => m,
        (Some(s), Reciprocity::Reciprocal) => m.round_region(s, Region::UpperTriangle).enforce_reciprocity(),
        (Some(s), Reciprocity::Arbitrary) => m.round_region(s, Region::OffDiagonal),
    })
}

pub fn prioritize(
    path: &Path,
    mode: Option<Reciprocity>,
    scale: Option<JudgmentScale>,
    method: PrioritizationMethod,
) -> CliResult<()> {
    let m = read_matrix(path, mode, scale)?;
    let e = estimate(&m, method, &OptimizerSettings::default())?;
    println!("{}", e.vector.to_fixed6());
    if let Some(lambda) = e.lambda_max {
        println!("lambda_max {lambda:.6}");
    }
    if let Some(objective) = e.objective {
        println!("objective {objective:.6}");
    }
    Ok(())
}

pub fn consistency(
    path: &Path,
    mode: Option<Reciprocity>,
    scale: Option<JudgmentScale>,
    measures: &[ConsistencyMeasure],
) -> CliResult<()> {
    let m = read_matrix(path, mode, scale)?;
    let measures = if measures.is_empty() { &ConsistencyMeasure::ALL[..] } else { measures };
    let opt = OptimizerSettings::default();
    // Evaluate everything before printing so an input error leaves no partial table.
    let mut lines = Vec::with_capacity(measures.len());
    for &measure in measures {
        let cell = match measure.evaluate(&m, &opt) {
            Ok(v) => format!("{v:.6}"),
            Err(PcmError::NotDefinedForArbitrary { .. }) => "not defined".to_string(),
            Err(e) => return Err(e.into()),
        };
        lines.push(format!("{:<9} {cell}", measure.label()));
    }
    for line in lines {
        println!("{line}");
    }
    Ok(())
}

/// Arguments shared by the two simulation commands.
pub struct Study<'a> {
    pub config: Option<&'a Path>,
    pub preset: Option<&'a str>,
    pub seed: Option<u64>,
    pub out: &'a Path,
    pub workers: usize,
}

impl Study<'_> {
    fn text(&self) -> CliResult<String> {
        match self.config {
            Some(p) => fs::read_to_string(p).map_err(|e| CliError::io(p, e)),
            None if self.preset.is_some() => Ok(String::new()),
            None => Err(CliError::Usage("a config file or --preset is required".into())),
        }
    }

    fn create_out(&self) -> CliResult<()> {
        fs::create_dir_all(self.out).map_err(|e| CliError::io(self.out, e))
    }

    /// Writes one output file through `write`, returning its name.
    fn write<F>(&self, name: &str, write: F) -> CliResult<String>
    where
        F: FnOnce(&mut BufWriter<File>) -> pcmlab::Result<()>,
    {
        let path = self.out.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = BufWriter::new(file);
        write(&mut w)?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(name.to_string())
    }

    fn write_text(&self, name: &str, text: &str) -> CliResult<String> {
        let path = self.out.join(name);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(name.to_string())
    }
}

pub fn sa1(study: &Study) -> CliResult<()> {
    let start = Instant::now();
    let mut file: Sa1File = parse_sa1_file(&study.text()?)?;
    if let Some(p) = study.preset {
        file.preset = Some(p.to_string());
    }
    if let Some(s) = study.seed {
        file.seed = Some(s);
    }
    let effective = file.effective()?;
    let config = effective.resolve()?;
    let outcome = run_sa1(&config, study.workers)?;

    study.create_out()?;
    let effective_toml = to_toml(&effective)?;
    let mut manifest = RunManifest::new("sa1", serde_json::to_value(&config)?);
    manifest.seed = Some(config.seed);
    manifest.workers = Some(study.workers);
    manifest.outputs = vec![
        study.write(RECORDS_FILE, |w| outcome.write_records_csv(w))?,
        study.write(SUMMARY_FILE, |w| outcome.write_summary_csv(w))?,
        study.write_text(CONFIG_FILE, &effective_toml)?,
    ];
    manifest.effective_config = Some(effective_toml);
    for s in &outcome.summaries {
        let a = s.summary;
        println!(
            "{:<5} MRE {:.6}  MSRC {:.6}  MRR {:.6}  (n = {}, excluded {})",
            s.method.as_str().to_uppercase(),
            a.mre,
            a.msrc,
            a.mrr,
            a.count,
            s.excluded
        );
    }
    manifest.finish(study.out, start.elapsed())?;
    Ok(())
}

pub fn sa2(study: &Study) -> CliResult<()> {
    let start = Instant::now();
    let mut file: Sa2File = parse_sa2_file(&study.text()?)?;
    if let Some(p) = study.preset {
        file.preset = Some(p.to_string());
    }
    if let Some(s) = study.seed {
        file.seed = Some(s);
    }
    let effective = file.effective()?;
    let config = effective.resolve()?;
    let records = run_sa2(&config, study.workers)?;

    study.create_out()?;
    let effective_toml = to_toml(&effective)?;
    let mut manifest = RunManifest::new("sa2", serde_json::to_value(&config)?);
    manifest.seed = Some(config.seed);
    manifest.workers = Some(study.workers);
    manifest.outputs = vec![
        study.write(RECORDS_FILE, |w| records.write_csv(w))?,
        study.write(SUMMARY_FILE, |w| records.write_summary_csv(w))?,
        study.write_text(CONFIG_FILE, &effective_toml)?,
    ];
    manifest.effective_config = Some(effective_toml);
    println!("{} records ({} excluded)", records.len(), records.excluded);
    manifest.finish(study.out, start.elapsed())?;
    Ok(())
}

pub fn report(path: &Path, measure: &str, bins: usize, out: Option<&Path>) -> CliResult<()> {
    let start = Instant::now();
    if bins != BIN_COUNT {
        return Err(CliError::Usage(format!("--bins: only {BIN_COUNT} bins are supported, got {bins}")));
    }
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let records = RecordSet::read_csv(std::io::BufReader::new(file))?;
    let report = bin_records(&records, measure)?;
    let scores = MaeColumn::ALL
        .iter()
        .map(|&c| {
            let score = cm_quality_score(&report, c).map_or_else(|_| "undefined".to_string(), |s| format!("{s:.6}"));
            format!("cm_quality_score {} {score}", c.column())
        })
        .collect::<Vec<_>>();

    let Some(dir) = out else {
        print!("{}", report.to_csv_string()?);
        for line in &scores {
            eprintln!("{line}");
        }
        return Ok(());
    };
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = format!("report_{measure}.csv");
    let target: PathBuf = dir.join(&name);
    fs::write(&target, report.to_csv_string()?).map_err(|e| CliError::io(&target, e))?;
    let mut manifest = RunManifest::new(
        "report",
        serde_json::json!({ "records": path, "measure": measure, "bins": bins }),
    );
    manifest.outputs = vec![name];
    for line in &scores {
        println!("{line}");
    }
    manifest.finish(dir, start.elapsed())?;
    Ok(())
}

pub fn validate() -> CliResult<()> {
    let checks = golden_checks();
    let mut first_failure = None;
    for c in &checks {
        let status = match (c.passed(), c.known_discrepancy) {
            (true, _) => "PASS",
            (false, Some(_)) => "KNOWN",
            (false, None) => "FAIL",
        };
        println!(
            "{status:<5} {}: expected {} got {:.9} (tolerance {:e})",
            c.name, c.expected, c.actual, c.tolerance
        );
        if let (false, Some(why)) = (c.passed(), c.known_discrepancy) {
            println!("      {why}");
        }
        if !c.gates_ok() && first_failure.is_none() {
            first_failure = Some(c.name.clone());
        }
    }
    let passed = checks.iter().filter(|c| c.passed()).count();
    let known = checks.iter().filter(|c| !c.passed() && c.gates_ok()).count();
    let noun = if known == 1 { "discrepancy" } else { "discrepancies" };
    println!("{passed} of {} checks passed, {known} known {noun}", checks.len());
    match first_failure {
        Some(name) => Err(CliError::Validation(format!("first failing check: {name}"))),
        None => Ok(()),
    }
}
