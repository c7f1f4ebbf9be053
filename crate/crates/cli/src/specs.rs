//! Declarative process and field construction from config keys.

use levelcross::simulate::{
    DeterministicField, Drift, FieldSpec, ImpulseLaw, Kernel, OmegaLaw, ProcessSpec, RadialKernel,
    SphereKernel, Volatility,
};

use crate::config::Config;
use crate::error::CliError;

/// Either side of the process registry.
pub enum AnySpec {
    Path(ProcessSpec),
    Field(FieldSpec),
}

/// Reads `process.*` keys into a spec; `process.kind` selects the family.
pub fn build_spec(cfg: &Config) -> Result<AnySpec, CliError> {
    let kind = cfg.require("process.kind")?;
    match kind.as_str() {
        "sine_cosine" => Ok(AnySpec::Path(ProcessSpec::SineCosine {
            omega: build_omega(cfg)?,
        })),
        "spectral_gaussian" => Ok(AnySpec::Path(ProcessSpec::SpectralGaussian {
            atoms: build_atoms(cfg)?,
        })),
        "chi_square" => Ok(AnySpec::Path(ProcessSpec::ChiSquare {
            n: cfg.require_u64("process.n")? as u32,
            atoms: build_atoms(cfg)?,
        })),
        "shot_noise_1d" => Ok(AnySpec::Path(ProcessSpec::ShotNoise1D {
            lambda: cfg.require_f64("process.lambda")?,
            kernel: build_kernel(cfg)?,
            impulse: build_impulse(cfg)?,
            window_pad: cfg.get_f64("process.pad")?,
        })),
        "regularized_diffusion" => Ok(AnySpec::Path(ProcessSpec::RegularizedDiffusion {
            drift: build_drift(cfg)?,
            vol: build_vol(cfg)?,
            horizon: cfg.require_f64("process.horizon")?,
            euler_step: cfg.f64_or("process.euler_step", 0.001)?,
            burn_in: cfg.f64_or("process.burn_in", 1.0)?,
            x0: cfg.f64_or("process.x0", 0.0)?,
        })),
        "shot_noise_ball" => Ok(AnySpec::Field(FieldSpec::ShotNoiseBall {
            dim: cfg.require_u64("process.d")? as u32,
            radius: cfg.f64_or("process.radius", 1.0)?,
            lambda: cfg.require_f64("process.lambda")?,
            kernel: RadialKernel {
                q: cfg.u64_or("process.q", 1)? as u32,
            },
            impulse: build_impulse(cfg)?,
            pad: cfg.get_f64("process.pad")?,
        })),
        "sphere_shot_noise" => Ok(AnySpec::Field(FieldSpec::SphereShotNoise {
            dim: cfg.require_u64("process.d")? as u32,
            lambda: cfg.require_f64("process.lambda")?,
            kernel: SphereKernel {
                rate: cfg.f64_or("process.rate", 1.0)?,
            },
            impulse: build_impulse(cfg)?,
        })),
        "deterministic_ball" => Ok(AnySpec::Field(FieldSpec::DeterministicBall {
            dim: cfg.require_u64("process.d")? as u32,
            radius: cfg.f64_or("process.radius", 1.0)?,
            field: build_det_field(cfg)?,
        })),
        "deterministic_sphere" => Ok(AnySpec::Field(FieldSpec::DeterministicSphere {
            dim: cfg.require_u64("process.d")? as u32,
            field: build_det_field(cfg)?,
        })),
        other => Err(CliError::Config(format!(
            "key 'process.kind': unknown family '{other}'"
        ))),
    }
}

/// Identifier written to the `spec_id` CSV column.
pub fn spec_id(cfg: &Config) -> Result<String, CliError> {
    Ok(match cfg.get("process.id") {
        Some(id) => id,
        None => cfg.require("process.kind")?,
    })
}

fn build_omega(cfg: &Config) -> Result<OmegaLaw, CliError> {
    match cfg.get("process.omega").as_deref().unwrap_or("pareto") {
        "fixed" => Ok(OmegaLaw::Fixed {
            value: cfg.require_f64("process.omega.value")?,
        }),
        "pareto" => Ok(OmegaLaw::Pareto {
            shape: cfg.f64_or("process.omega.shape", 4.0)?,
        }),
        "pareto_truncated" => Ok(OmegaLaw::ParetoTruncated {
            shape: cfg.f64_or("process.omega.shape", 4.0)?,
            max: cfg.require_f64("process.omega.max")?,
        }),
        other => Err(CliError::Config(format!(
            "key 'process.omega': unknown law '{other}'"
        ))),
    }
}

/// Atoms come as `sigma2:freq` pairs separated by commas.
fn build_atoms(cfg: &Config) -> Result<Vec<(f64, f64)>, CliError> {
    let raw = cfg
        .get("process.atoms")
        .unwrap_or_else(|| "1.0:1.0".to_string());
    raw.split(',')
        .map(|pair| {
            let (s2, freq) = pair.trim().split_once(':').ok_or_else(|| {
                CliError::Config(format!(
                    "key 'process.atoms': expected sigma2:freq, got '{pair}'"
                ))
            })?;
            let s2: f64 = s2
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad atom weight '{s2}'")))?;
            let freq: f64 = freq
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad atom frequency '{freq}'")))?;
            if s2 <= 0.0 || freq < 0.0 {
                return Err(CliError::Config(
                    "key 'process.atoms': weights must be positive, frequencies nonnegative".into(),
                ));
            }
            Ok((s2, freq))
        })
        .collect()
}

pub fn build_kernel(cfg: &Config) -> Result<Kernel, CliError> {
    match cfg.get("process.kernel").as_deref().unwrap_or("gaussian") {
        "gaussian" => Ok(Kernel::GaussianBump),
        "exp_one_sided" => Ok(Kernel::ExpOneSided),
        "exp_symmetric" => Ok(Kernel::ExpSymmetric {
            rate: cfg.f64_or("process.kernel.rate", 1.0)?,
        }),
        "poly_exp" => Ok(Kernel::PolyExpOneSided {
            degree: cfg.u64_or("process.kernel.degree", 4)? as u32,
            rate: cfg.f64_or("process.kernel.rate", 1.0)?,
        }),
        "reciprocal" => Ok(Kernel::Reciprocal),
        other => Err(CliError::Config(format!(
            "key 'process.kernel': unknown kernel '{other}'"
        ))),
    }
}

pub fn build_impulse(cfg: &Config) -> Result<ImpulseLaw, CliError> {
    match cfg.get("process.impulse").as_deref().unwrap_or("constant") {
        "constant" => Ok(ImpulseLaw::Constant {
            value: cfg.f64_or("process.impulse.value", 1.0)?,
        }),
        "normal" => Ok(ImpulseLaw::Normal {
            mean: cfg.f64_or("process.impulse.mean", 0.0)?,
            std: cfg.f64_or("process.impulse.std", 1.0)?,
        }),
        "uniform" => Ok(ImpulseLaw::Uniform {
            lo: cfg.require_f64("process.impulse.lo")?,
            hi: cfg.require_f64("process.impulse.hi")?,
        }),
        "exponential" => Ok(ImpulseLaw::Exponential {
            rate: cfg.f64_or("process.impulse.rate", 1.0)?,
        }),
        "rayleigh" => Ok(ImpulseLaw::Rayleigh {
            sigma: cfg.f64_or("process.impulse.sigma", 1.0)?,
        }),
        other => Err(CliError::Config(format!(
            "key 'process.impulse': unknown law '{other}'"
        ))),
    }
}

fn build_drift(cfg: &Config) -> Result<Drift, CliError> {
    match cfg.get("process.drift").as_deref().unwrap_or("zero") {
        "zero" => Ok(Drift::Zero),
        "const" => Ok(Drift::Const {
            value: cfg.require_f64("process.drift.value")?,
        }),
        "mean_revert" => Ok(Drift::MeanRevert {
            rate: cfg.require_f64("process.drift.rate")?,
        }),
        "bounded_tanh" => Ok(Drift::BoundedTanh {
            scale: cfg.require_f64("process.drift.scale")?,
        }),
        other => Err(CliError::Config(format!(
            "key 'process.drift': unknown drift '{other}'"
        ))),
    }
}

fn build_vol(cfg: &Config) -> Result<Volatility, CliError> {
    match cfg.get("process.vol").as_deref().unwrap_or("const") {
        "const" => Ok(Volatility::Const {
            value: cfg.f64_or("process.vol.value", 1.0)?,
        }),
        "smooth_growth" => Ok(Volatility::SmoothGrowth {
            scale: cfg.f64_or("process.vol.scale", 1.0)?,
        }),
        other => Err(CliError::Config(format!(
            "key 'process.vol': unknown volatility '{other}'"
        ))),
    }
}

fn build_det_field(cfg: &Config) -> Result<DeterministicField, CliError> {
    match cfg.require("process.field")?.as_str() {
        "coordinate" => Ok(DeterministicField::Coordinate {
            axis: cfg.u64_or("process.field.axis", 0)? as usize,
        }),
        "linear" => {
            let coeffs = cfg
                .f64_list("process.field.coeffs")?
                .ok_or_else(|| CliError::Config("missing key 'process.field.coeffs'".into()))?;
            Ok(DeterministicField::LinearForm { coeffs })
        }
        "radius_sq" => Ok(DeterministicField::RadiusSq {
            offset: cfg.require_f64("process.field.offset")?,
        }),
        "constant" => Ok(DeterministicField::Constant {
            value: cfg.require_f64("process.field.value")?,
        }),
        other => Err(CliError::Config(format!(
            "key 'process.field': unknown field '{other}'"
        ))),
    }
}
