//! `zktax`: sign, redact, prove and verify tax documents.
//!
//! Exit codes: 0 success, 1 verification rejected, 2 usage error,
//! 3 cryptographic or internal failure.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "zktax", version, about = "Selective disclosure of signed tax documents with zero-knowledge proofs")]
struct Cli {
    /// Default location of proving.key and verification_key.json.
    #[arg(long, global = true, env = "ZKTAX_ARTIFACT_DIR", default_value = ".")]
    artifact_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct TemplateArg {
    /// Template descriptor; defaults to the bundled 2020 Form 1040.
    #[arg(long)]
    template: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a signing key pair.
    Keygen {
        /// Secret key output (written owner-only).
        #[arg(long)]
        out: PathBuf,
        /// Public key output; defaults to the secret key path with a .pub extension.
        #[arg(long = "pub")]
        public_out: Option<PathBuf>,
        #[arg(long, default_value = "tts")]
        label: String,
        /// 32-byte seed in hex instead of OS randomness.
        #[arg(long)]
        seed_hex: Option<String>,
    },
    /// Run the local (insecure, single-party) Groth16 setup for the redaction circuit.
    Setup {
        #[command(flatten)]
        template: TemplateArg,
        /// Output directory; defaults to the artifact directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Setup entropy in hex (at least 32 bytes) instead of OS randomness.
        #[arg(long)]
        entropy_hex: Option<String>,
    },
    /// Sign a document as the tax service.
    Sign {
        /// Flat JSON document.
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        template: TemplateArg,
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Redact fields of a signed bundle and prove the redaction.
    RedactProve {
        #[arg(long)]
        bundle: PathBuf,
        /// Comma-separated keys to keep; every other template field is redacted.
        #[arg(long, value_delimiter = ',', conflicts_with = "redact")]
        redact_all_except: Option<Vec<String>>,
        /// Comma-separated keys to redact.
        #[arg(long, value_delimiter = ',')]
        redact: Option<Vec<String>>,
        /// Proving key; defaults to proving.key in the artifact directory.
        #[arg(long)]
        pk: Option<PathBuf>,
        /// Disclosure directory to create.
        #[arg(long)]
        out: PathBuf,
        /// Also publish the signature (lets readers test guesses of redacted values).
        #[arg(long)]
        include_signature: bool,
    },
    /// Verify a disclosure directory.
    Verify {
        /// Disclosure directory.
        #[arg(long = "in")]
        input: PathBuf,
        /// Verifying key; defaults to verification_key.json in the artifact directory.
        #[arg(long)]
        vk: Option<PathBuf>,
        /// Trusted signer public key file (repeatable).
        #[arg(long, required = true)]
        trust: Vec<PathBuf>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Pretty-print a bundle, disclosure or key without verifying it.
    Inspect { path: PathBuf },
    /// Serve the tax service signing API.
    ServeTts {
        #[arg(long)]
        key: PathBuf,
        #[command(flatten)]
        template: TemplateArg,
        #[arg(long, default_value = "127.0.0.1:8701")]
        addr: std::net::SocketAddr,
    },
    /// Serve the verification API.
    ServeVerify {
        /// Verifying key (repeatable); defaults to verification_key.json in the artifact directory.
        #[arg(long)]
        vk: Vec<PathBuf>,
        #[arg(long, required = true)]
        trust: Vec<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8702")]
        addr: std::net::SocketAddr,
    },
    /// Serve the local redact-and-prove API (loopback only).
    ServeLocal {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        pk: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8703")]
        addr: std::net::SocketAddr,
        #[arg(long)]
        include_signature: bool,
    },
}

#[derive(Debug)]
pub enum CliError {
    Rejected,
    Usage(String),
    Io(String),
    Crypto(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Rejected => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Crypto(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(cli.command, &cli.artifact_dir);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Rejected => {}
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Io(m) => eprintln!("I/O error: {m}"),
                CliError::Crypto(m) => eprintln!("failed: {m}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
