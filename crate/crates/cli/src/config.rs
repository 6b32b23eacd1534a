//! Experiment configuration files: a flat key-value TOML schema shared by
//! `run` and `compare`. Unknown keys are rejected; keys that do not apply to
//! the selected response kind are rejected too, so a typo cannot silently
//! fall back to a default.

use std::path::Path;

use serde::Deserialize;

use itomc::engine::EstimateMode;
use itomc::response::{
    EndpointResponse, ExternalResponse, FrequencyModel, FrequencyResponse, ResponseFn, TripEvent,
};
use itomc::sampling::Placement;
use itomc::{make_preset, DistributionPreset, Error, ItoModel, PathOrigin, PresetKind, Result, TimeGrid};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    // Model source: exactly one of `preset` (+ `preset_a`, `preset_b`) or
    // `model_file` (path relative to the config file).
    pub preset: Option<String>,
    pub preset_a: Option<f64>,
    pub preset_b: Option<f64>,
    pub model_file: Option<String>,

    // Time grid.
    pub t0: Option<f64>,
    pub horizon: f64,
    pub step: f64,

    pub seed: u64,

    // `run` only.
    pub method: Option<String>,
    pub n: Option<usize>,

    // Spectral order of the fast method.
    pub k: Option<usize>,

    // `compare` only.
    pub mode: Option<String>,
    pub budget_traditional: Option<usize>,
    pub budget_fast: Option<usize>,

    // Fast-method design flags.
    pub placement: Option<String>,
    pub decorrelate: Option<bool>,

    // Response selection: endpoint | frequency | external.
    pub response: Option<String>,
    pub endpoint_component: Option<usize>,
    pub external_command: Option<Vec<String>>,

    // Frequency-response parameters.
    pub inertia: Option<f64>,
    pub damping: Option<f64>,
    pub droop: Option<f64>,
    pub governor_tc: Option<f64>,
    pub p_base: Option<f64>,
    pub wind_base: Option<f64>,
    pub schedule: Option<f64>,
    pub trip_time: Option<f64>,
    pub trip_power: Option<f64>,
    pub window_start: Option<f64>,
    pub window_end: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Traditional,
    Fast,
}

/// Response selection with the inputs needed to build a concrete evaluator.
#[derive(Debug, Clone)]
pub enum ResponseSpec {
    Endpoint { component: usize },
    Frequency { model: FrequencyModel, event: TripEvent, window: (f64, f64) },
    External { argv: Vec<String> },
}

impl ResponseSpec {
    /// Builds the evaluator for paths produced by the given scheme.
    pub fn build(&self, origin: PathOrigin) -> Result<Box<dyn ResponseFn>> {
        match self {
            ResponseSpec::Endpoint { component } => {
                Ok(Box::new(EndpointResponse { component: *component }))
            }
            ResponseSpec::Frequency { model, event, window } => Ok(Box::new(FrequencyResponse {
                model: *model,
                event: *event,
                window: *window,
                component: 0,
            })),
            ResponseSpec::External { argv } => {
                Ok(Box::new(ExternalResponse::new(argv.clone(), origin)?))
            }
        }
    }
}

/// A fully resolved experiment: model loaded, grid checked, response built.
pub struct Experiment {
    pub model: ItoModel,
    pub grid: TimeGrid,
    pub seed: u64,
    pub placement: Placement,
    pub decorrelate: bool,
    pub response: ResponseSpec,
    config: ExperimentConfig,
}

pub fn load(path: &Path) -> Result<Experiment> {
    let text = std::fs::read_to_string(path)?;
    let config: ExperimentConfig = toml::from_str(&text)
        .map_err(|e| Error::invalid("config", format!("{}: {e}", path.display())))?;
    resolve(config, path.parent().unwrap_or_else(|| Path::new(".")))
}

fn resolve(config: ExperimentConfig, base: &Path) -> Result<Experiment> {
    let model = resolve_model(&config, base)?;
    let t0 = config.t0.unwrap_or(0.0);
    if !(config.horizon > 0.0) {
        return Err(Error::invalid("horizon", "must be positive"));
    }
    let grid = TimeGrid::new(t0, t0 + config.horizon, config.step)?;
    let placement = match config.placement.as_deref() {
        Some(s) => Placement::parse(s)?,
        None => Placement::Uniform,
    };
    let decorrelate = config.decorrelate.unwrap_or(true);
    let response = resolve_response(&config, &model)?;
    Ok(Experiment {
        model,
        grid,
        seed: config.seed,
        placement,
        decorrelate,
        response,
        config,
    })
}

fn resolve_model(config: &ExperimentConfig, base: &Path) -> Result<ItoModel> {
    match (&config.preset, &config.model_file) {
        (Some(_), Some(_)) => {
            Err(Error::invalid("preset", "give either preset or model_file, not both"))
        }
        (None, None) => Err(Error::invalid("preset", "a model source is required: set preset (with preset_a, preset_b) or model_file")),
        (Some(name), None) => {
            let kind = PresetKind::parse(name).ok_or_else(|| {
                Error::invalid(
                    "preset",
                    format!("unknown preset {name:?}; expected gaussian, beta, gamma or laplace"),
                )
            })?;
            let a = config
                .preset_a
                .ok_or_else(|| Error::invalid("preset_a", "required with preset"))?;
            let b = config
                .preset_b
                .ok_or_else(|| Error::invalid("preset_b", "required with preset"))?;
            Ok(make_preset(&DistributionPreset::new(kind, a, b)?))
        }
        (None, Some(file)) => {
            if config.preset_a.is_some() || config.preset_b.is_some() {
                return Err(Error::invalid("preset_a", "only applies to preset models"));
            }
            itomc::model::read_model(&base.join(file))
        }
    }
}

fn resolve_response(config: &ExperimentConfig, model: &ItoModel) -> Result<ResponseSpec> {
    let kind = config.response.as_deref().unwrap_or("endpoint");
    let frequency_keys = [
        ("inertia", config.inertia.is_some()),
        ("damping", config.damping.is_some()),
        ("droop", config.droop.is_some()),
        ("governor_tc", config.governor_tc.is_some()),
        ("p_base", config.p_base.is_some()),
        ("wind_base", config.wind_base.is_some()),
        ("schedule", config.schedule.is_some()),
        ("trip_time", config.trip_time.is_some()),
        ("trip_power", config.trip_power.is_some()),
        ("window_start", config.window_start.is_some()),
        ("window_end", config.window_end.is_some()),
    ];
    let reject = |keys: &[(&'static str, bool)], unless: &str| -> Result<()> {
        for (name, set) in keys {
            if *set {
                return Err(Error::invalid(
                    "response",
                    format!("key {name} only applies to response = {unless:?}"),
                ));
            }
        }
        Ok(())
    };
    match kind {
        "endpoint" => {
            reject(&frequency_keys, "frequency")?;
            if config.external_command.is_some() {
                return Err(Error::invalid(
                    "response",
                    "key external_command only applies to response = \"external\"",
                ));
            }
            let component = config.endpoint_component.unwrap_or(1);
            if component == 0 || component > model.state_dim() {
                return Err(Error::invalid(
                    "endpoint_component",
                    format!(
                        "component {component} out of range 1..={}",
                        model.state_dim()
                    ),
                ));
            }
            Ok(ResponseSpec::Endpoint { component: component - 1 })
        }
        "frequency" => {
            if config.endpoint_component.is_some() {
                return Err(Error::invalid(
                    "response",
                    "key endpoint_component only applies to response = \"endpoint\"",
                ));
            }
            if config.external_command.is_some() {
                return Err(Error::invalid(
                    "response",
                    "key external_command only applies to response = \"external\"",
                ));
            }
            // The scheduled output defaults to the model's starting point, so
            // an undisturbed path carries zero imbalance.
            let schedule = config.schedule.unwrap_or_else(|| model.initial()[0]);
            let mut fm = FrequencyModel::with_schedule(schedule);
            if let Some(v) = config.inertia {
                fm.inertia = v;
            }
            if let Some(v) = config.damping {
                fm.damping = v;
            }
            if let Some(v) = config.droop {
                fm.droop = v;
            }
            if let Some(v) = config.governor_tc {
                fm.governor_tc = v;
            }
            if let Some(v) = config.p_base {
                fm.p_base = v;
            }
            if let Some(v) = config.wind_base {
                fm.wind_base = v;
            }
            fm.validate()?;
            let mut event = TripEvent::default();
            if let Some(v) = config.trip_time {
                event.time = v;
            }
            if let Some(v) = config.trip_power {
                event.lost_power = v;
            }
            event.validate()?;
            let window = (config.window_start.unwrap_or(0.0), config.window_end.unwrap_or(60.0));
            if !(window.0 < window.1) {
                return Err(Error::invalid("window_start", "window must be non-empty"));
            }
            Ok(ResponseSpec::Frequency { model: fm, event, window })
        }
        "external" => {
            reject(&frequency_keys, "frequency")?;
            if config.endpoint_component.is_some() {
                return Err(Error::invalid(
                    "response",
                    "key endpoint_component only applies to response = \"endpoint\"",
                ));
            }
            let argv = config
                .external_command
                .clone()
                .ok_or_else(|| Error::invalid("external_command", "required with response = \"external\""))?;
            if argv.is_empty() {
                return Err(Error::invalid("external_command", "need a program name"));
            }
            Ok(ResponseSpec::External { argv })
        }
        other => Err(Error::invalid(
            "response",
            format!("unknown response {other:?}; expected endpoint, frequency or external"),
        )),
    }
}

impl Experiment {
    /// Method and budget for `run`.
    pub fn run_settings(&self) -> Result<(MethodChoice, usize, usize)> {
        let method = match self.config.method.as_deref().unwrap_or("fast") {
            "fast" => MethodChoice::Fast,
            "traditional" => MethodChoice::Traditional,
            other => {
                return Err(Error::invalid(
                    "method",
                    format!("unknown method {other:?}; expected fast or traditional"),
                ))
            }
        };
        let n = self.config.n.ok_or_else(|| Error::invalid("n", "required by run"))?;
        if n == 0 {
            return Err(Error::invalid("n", "need at least one sample"));
        }
        let k = match method {
            MethodChoice::Fast => self.k_order()?,
            MethodChoice::Traditional => 0,
        };
        Ok((method, n, k))
    }

    /// Mode, budgets and spectral order for `compare`.
    pub fn compare_settings(&self) -> Result<(EstimateMode, usize, usize, usize)> {
        let mode = match self.config.mode.as_deref() {
            Some(s) => EstimateMode::parse(s)?,
            None => EstimateMode::Prefix,
        };
        let traditional = self
            .config
            .budget_traditional
            .ok_or_else(|| Error::invalid("budget_traditional", "required by compare"))?;
        let fast = self
            .config
            .budget_fast
            .ok_or_else(|| Error::invalid("budget_fast", "required by compare"))?;
        Ok((mode, traditional, fast, self.k_order()?))
    }

    fn k_order(&self) -> Result<usize> {
        let k = self.config.k.ok_or_else(|| Error::invalid("k", "required by the fast method"))?;
        if k == 0 {
            return Err(Error::invalid("k", "need at least one spectral mode"));
        }
        Ok(k)
    }
}
