use std::fs;
use std::path::{Path, PathBuf};

use acfz::fis::{load_fis_config, FisConfig};
use acfz::imgio::{self, ContainerError, CONTAINER_MAGIC};
use acfz::metrics::{build_report, MetricsError};
use acfz::pipeline::PipelineError;
use acfz::{ChaosParams, CipherContainer, DecryptionKey, GrayImage, MasterKey, RunConfig};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    BadInput(String),
    #[error("{0}")]
    BadKey(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("{0}")]
    Integrity(String),
    #[error("{0}")]
    Dimension(String),
    #[error("{0}")]
    Fis(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BadInput(_) => 2,
            CliError::BadKey(_) => 3,
            CliError::Internal(_) => 4,
            CliError::Integrity(_) => 5,
            CliError::Dimension(_) => 6,
            CliError::Fis(_) => 7,
        }
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::BadInput(format!("cannot write {}: {e}", path.display())))
}

fn read(path: &Path, what: fn(String) -> CliError) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| what(format!("cannot read {}: {e}", path.display())))
}

pub fn keygen(out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let mut key = [0u8; 64];
    match seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed).fill_bytes(&mut key),
        None => rand::rngs::OsRng.fill_bytes(&mut key),
    }
    write(out, &key)?;
    println!("wrote 64-byte master key to {}", out.display());
    Ok(())
}

pub fn load_fis(path: &Path) -> Result<FisConfig, CliError> {
    let bytes = read(path, CliError::BadInput)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Fis(format!("{}: not UTF-8 text", path.display())))?;
    load_fis_config(&text).map_err(|e| CliError::Fis(format!("{}: {e}", path.display())))
}

pub fn run_config(
    mu: f64,
    burn_in: usize,
    sec: f64,
    t1: f64,
    t2: f64,
    fis1: Option<&Path>,
    fis2: Option<&Path>,
) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::with_sec(sec);
    config.chaos = ChaosParams::new(mu, burn_in);
    config.phase2.t1 = t1;
    config.phase2.t2 = t2;
    if let Some(path) = fis1 {
        config.phase2.fis1 = load_fis(path)?;
    }
    if let Some(path) = fis2 {
        config.phase2.fis2 = load_fis(path)?;
    }
    config.validate().map_err(|e| CliError::BadInput(e.to_string()))?;
    Ok(config)
}

fn load_image(path: &Path) -> Result<GrayImage, CliError> {
    imgio::load_gray(path).map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))
}

pub fn encrypt(
    input: &Path,
    key: &Path,
    out: &Path,
    deckey: &Path,
    config: &RunConfig,
) -> Result<(), CliError> {
    let img = load_image(input)?;
    let key_bytes = read(key, CliError::BadKey)?;
    let master = MasterKey::from_slice(&key_bytes).ok_or_else(|| {
        CliError::BadKey(format!(
            "{}: master key must be 64 bytes, got {}",
            key.display(),
            key_bytes.len()
        ))
    })?;
    let enc = acfz::encrypt(&img, &master, config).map_err(|e| match e {
        PipelineError::Config(e) => CliError::BadInput(e.to_string()),
        PipelineError::Phase2(acfz::phase2::Phase2Error::Fis(e)) => CliError::Fis(e.to_string()),
        other => CliError::Internal(other.to_string()),
    })?;
    write(out, &enc.container.encode())?;
    write(deckey, &enc.key.pack())?;

    let o = &enc.outcome;
    let cipher = GrayImage::new(img.width(), img.height(), o.cipher[..img.len()].to_vec())
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let report = build_report(&cipher, None).map_err(|e| CliError::Internal(e.to_string()))?;
    let last = o.d_dive_history.last().expect("checkpoint 2 runs at least once");
    println!("s_dive {:.6}", o.s_dive);
    println!("aes_flag {}", o.aes_flag as u8);
    println!("xor_count {}", o.xor_count);
    println!("d_dive {:.6}", last.d_dive);
    println!("companion_npcr {:.4}", last.npcr);
    println!("companion_uaci {:.4}", last.uaci);
    print!("{}", report.to_text());
    Ok(())
}

pub fn decrypt(input: &Path, deckey: &Path, out: &Path, mu: f64, burn_in: usize) -> Result<(), CliError> {
    let key_bytes = read(deckey, CliError::BadKey)?;
    let key = DecryptionKey::unpack(&key_bytes)
        .map_err(|e| CliError::BadKey(format!("{}: {e}", deckey.display())))?;
    let container = match imgio::load_cipher(input) {
        Ok(c) => c,
        Err(ContainerError::Io(e)) => {
            return Err(CliError::BadInput(format!("cannot read {}: {e}", input.display())))
        }
        Err(e) => return Err(CliError::Integrity(format!("{}: {e}", input.display()))),
    };
    if !(mu > 0.0 && mu < 2.0) {
        return Err(CliError::BadInput(format!("mu must lie in (0, 2), got {mu}")));
    }
    let dec = acfz::decrypt(&container, &key, &ChaosParams::new(mu, burn_in))
        .map_err(|e| CliError::Integrity(e.to_string()))?;
    imgio::store_gray(&dec.image, out).map_err(|e| CliError::BadInput(format!("{}: {e}", out.display())))?;
    if !dec.hash_matches {
        return Err(CliError::Integrity(format!(
            "recovered image does not match the hash in the key (wrong key or parameters?); written to {}",
            out.display()
        )));
    }
    println!("wrote {}x{} image to {}", dec.image.width(), dec.image.height(), out.display());
    Ok(())
}

/// A plain image, or the pixel part of a cipher container.
fn load_any(path: &Path) -> Result<GrayImage, CliError> {
    let bytes = read(path, CliError::BadInput)?;
    if bytes.starts_with(&CONTAINER_MAGIC) {
        let c = CipherContainer::decode(&bytes)
            .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
        let n = c.pixel_count();
        return GrayImage::new(c.width as usize, c.height as usize, c.payload[..n].to_vec())
            .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())));
    }
    imgio::decode_gray(&bytes).map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn analyze(image: &Path, other: Option<&Path>, out: Option<&Path>) -> Result<(), CliError> {
    let a = load_any(image)?;
    let b = other.map(load_any).transpose()?;
    let report = build_report(&a, b.as_ref()).map_err(|e| match e {
        MetricsError::DimensionMismatch(..) => CliError::Dimension(e.to_string()),
        other => CliError::Internal(other.to_string()),
    })?;
    let text = report.to_text();
    print!("{text}");
    if let Some(prefix) = out {
        write(&with_suffix(prefix, ".txt"), text.as_bytes())?;
        write(&with_suffix(prefix, ".json"), report.to_json().as_bytes())?;
        write(&with_suffix(prefix, ".hist.csv"), report.histogram_csv().as_bytes())?;
    }
    Ok(())
}

pub fn fis(config: &FisConfig, dump: bool, inputs: &[(String, f64)]) -> Result<(), CliError> {
    if dump {
        print!("{}", config.to_document());
        return Ok(());
    }
    let values: Vec<(&str, f64)> = inputs.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    let inference = config.infer(&values).map_err(|e| CliError::BadInput(e.to_string()))?;
    for (n, (rule, w)) in config.rules().iter().zip(&inference.firing).enumerate() {
        let conds: Vec<String> = rule
            .antecedents
            .iter()
            .map(|(v, t)| format!("{v} IS {t}"))
            .collect();
        println!(
            "rule {}: IF {} THEN {} IS {} -> {w:.6}",
            n + 1,
            conds.join(" AND "),
            rule.consequent.0,
            rule.consequent.1
        );
    }
    println!("{} {:.6}", config.output().name, inference.output);
    Ok(())
}
