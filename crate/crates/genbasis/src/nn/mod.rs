//! Surrogate hypotheses: small classifiers trained to 100% accuracy on a
//! chosen subset, with fully seeded determinism.

mod net;

pub use net::{argmax, softmax, softmax_cross_entropy, Adam, LayerKind, Net, Scalar};

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::data::LabeledPool;
use crate::error::{Error, Result};

/// How many fresh initializations `train_to_fit` tries before reporting
/// a fit failure.
pub const DEFAULT_REINIT_LIMIT: usize = 5;

const CHECKPOINT_MAGIC: &str = "SGNN1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Architecture {
    /// Fully connected stack with the given hidden widths.
    Mlp(Vec<usize>),
    /// Two 4x4 stride-2 conv layers (32 then 64 channels) into a hidden
    /// layer of the given width.
    Conv(usize),
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Architecture::Mlp(h) => {
                write!(f, "mlp:")?;
                for (i, w) in h.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
            Architecture::Conv(latent) => write!(f, "conv:{latent}"),
        }
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::input(format!("bad architecture `{s}`, want mlp:H or conv:H")))?;
        match kind {
            "mlp" => {
                let widths: Vec<usize> = rest
                    .split(',')
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::input(format!("bad hidden width `{t}`")))
                    })
                    .collect::<Result<_>>()?;
                if widths.is_empty() || widths.contains(&0) {
                    return Err(Error::input("hidden widths must be >= 1"));
                }
                Ok(Architecture::Mlp(widths))
            }
            "conv" => {
                let latent: usize = rest
                    .parse()
                    .map_err(|_| Error::input(format!("bad latent width `{rest}`")))?;
                if latent == 0 {
                    return Err(Error::input("latent width must be >= 1"));
                }
                Ok(Architecture::Conv(latent))
            }
            other => Err(Error::input(format!("unknown architecture `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub arch: Architecture,
    pub num_classes: usize,
    /// Per-sample shape, e.g. `[28, 28]` for images or `[2]` for points.
    pub input_shape: Vec<usize>,
    pub learning_rate: f64,
    pub max_steps: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(arch: Architecture, num_classes: usize, input_shape: Vec<usize>) -> Self {
        ModelConfig {
            arch,
            num_classes,
            input_shape,
            learning_rate: 1e-3,
            max_steps: 10_000,
            batch_size: 32,
            seed: 0,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut c = self.clone();
        c.seed = seed;
        c
    }

    pub fn input_len(&self) -> usize {
        self.input_shape.iter().product()
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::input("need at least two classes"));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::input("learning rate must be positive"));
        }
        if self.max_steps == 0 || self.batch_size == 0 {
            return Err(Error::input("max_steps and batch_size must be >= 1"));
        }
        match &self.arch {
            Architecture::Mlp(h) if h.is_empty() || h.contains(&0) => {
                Err(Error::input("hidden widths must be >= 1"))
            }
            Architecture::Conv(0) => Err(Error::input("latent width must be >= 1")),
            Architecture::Conv(_) if self.input_shape.len() != 2 => Err(Error::input(
                "conv architecture needs 2-d (rows x cols) samples",
            )),
            _ => Ok(()),
        }
    }

    /// The layer stack for this configuration.
    pub fn layer_kinds(&self) -> Result<Vec<LayerKind>> {
        self.validate()?;
        let mut kinds = Vec::new();
        match &self.arch {
            Architecture::Mlp(hidden) => {
                let mut cur = self.input_len();
                for &h in hidden {
                    kinds.push(LayerKind::Dense {
                        in_dim: cur,
                        out_dim: h,
                    });
                    kinds.push(LayerKind::Relu);
                    cur = h;
                }
                kinds.push(LayerKind::Dense {
                    in_dim: cur,
                    out_dim: self.num_classes,
                });
            }
            Architecture::Conv(latent) => {
                let (h, w) = (self.input_shape[0], self.input_shape[1]);
                if h < 10 || w < 10 {
                    return Err(Error::input(
                        "conv architecture needs at least 10x10 inputs",
                    ));
                }
                let o1 = ((h - 4) / 2 + 1, (w - 4) / 2 + 1);
                let o2 = ((o1.0 - 4) / 2 + 1, (o1.1 - 4) / 2 + 1);
                kinds.push(LayerKind::Conv {
                    in_c: 1,
                    in_h: h,
                    in_w: w,
                    out_c: 32,
                    kernel: 4,
                    stride: 2,
                });
                kinds.push(LayerKind::Relu);
                kinds.push(LayerKind::Conv {
                    in_c: 32,
                    in_h: o1.0,
                    in_w: o1.1,
                    out_c: 64,
                    kernel: 4,
                    stride: 2,
                });
                kinds.push(LayerKind::Relu);
                kinds.push(LayerKind::Dense {
                    in_dim: 64 * o2.0 * o2.1,
                    out_dim: *latent,
                });
                kinds.push(LayerKind::Relu);
                kinds.push(LayerKind::Dense {
                    in_dim: *latent,
                    out_dim: self.num_classes,
                });
            }
        }
        Ok(kinds)
    }

    pub fn build_net<T: Scalar>(&self, seed: u64) -> Result<Net<T>> {
        Net::new(self.layer_kinds()?, self.input_len(), seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub steps: usize,
    pub final_train_accuracy: f64,
    pub reinits: usize,
}

/// A classifier that reached 100% accuracy on its training subset.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub config: ModelConfig,
    net: Net<f32>,
    pub fit_report: FitReport,
}

impl TrainedModel {
    pub fn weights(&self) -> &[f32] {
        self.net.params()
    }

    pub fn net(&self) -> &Net<f32> {
        &self.net
    }

    pub fn predict(&self, features: &[f32]) -> Result<u8> {
        let logits = self
            .net
            .forward(&features.iter().map(|&v| v).collect::<Vec<f32>>(), None)?;
        Ok(argmax(&logits) as u8)
    }
}

fn subset_indices(pool: &LabeledPool, subset: &[u32]) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::input("training subset is empty"));
    }
    subset
        .iter()
        .map(|&id| {
            pool.index_of_id(id)
                .ok_or_else(|| Error::input(format!("sample id {id} not present in pool")))
        })
        .collect()
}

fn train_accuracy(net: &Net<f32>, pool: &LabeledPool, indices: &[usize]) -> Result<f64> {
    let mut correct = 0usize;
    for &i in indices {
        let logits = net.forward(pool.sample(i), None)?;
        if argmax(&logits) == pool.label(i) as usize {
            correct += 1;
        }
    }
    Ok(correct as f64 / indices.len() as f64)
}

/// Trains until every subset sample is classified correctly (argmax rule),
/// re-initializing up to [`DEFAULT_REINIT_LIMIT`] times. Deterministic in
/// `(pool, subset, config)`.
pub fn train_to_fit(pool: &LabeledPool, subset: &[u32], config: &ModelConfig) -> Result<TrainedModel> {
    config.validate()?;
    let indices = subset_indices(pool, subset)?;
    let mut last_accuracy = 0.0;
    for attempt in 0..DEFAULT_REINIT_LIMIT {
        let seed = config.seed.wrapping_add(attempt as u64);
        let mut net: Net<f32> = config.build_net(seed)?;
        let mut adam: Adam<f32> = Adam::new(net.num_params(), config.learning_rate);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
        let mut order = indices.clone();
        let mut grads = vec![0f32; net.num_params()];
        let mut cache: Vec<Vec<f32>> = Vec::new();
        let mut steps = 0usize;

        'attempt: loop {
            order.shuffle(&mut rng);
            for chunk in order.chunks(config.batch_size) {
                grads.iter_mut().for_each(|g| *g = 0.0);
                for &i in chunk {
                    let logits = net.forward(pool.sample(i), Some(&mut cache))?;
                    let (_, mut dlogits) =
                        softmax_cross_entropy(&logits, pool.label(i) as usize);
                    let scale = 1.0 / chunk.len() as f32;
                    dlogits.iter_mut().for_each(|d| *d *= scale);
                    net.backward(&cache, &dlogits, &mut grads);
                }
                adam.step(net.params_mut(), &grads);
                steps += 1;
                if steps >= config.max_steps {
                    break 'attempt;
                }
            }
            let acc = train_accuracy(&net, pool, &indices)?;
            if acc == 1.0 {
                return Ok(TrainedModel {
                    config: config.clone(),
                    net,
                    fit_report: FitReport {
                        steps,
                        final_train_accuracy: 1.0,
                        reinits: attempt,
                    },
                });
            }
        }
        last_accuracy = train_accuracy(&net, pool, &indices)?;
        if last_accuracy == 1.0 {
            return Ok(TrainedModel {
                config: config.clone(),
                net,
                fit_report: FitReport {
                    steps,
                    final_train_accuracy: 1.0,
                    reinits: attempt,
                },
            });
        }
    }
    Err(Error::FitFailure {
        reinits: DEFAULT_REINIT_LIMIT,
        final_accuracy: last_accuracy,
        max_steps: config.max_steps,
    })
}

/// Maximum relative error between analytic gradients and central finite
/// differences over 100 randomly chosen parameters, computed in f64.
pub fn gradient_check(config: &ModelConfig, batch: &[(Vec<f32>, u8)]) -> Result<f64> {
    if batch.is_empty() || batch.len() > 8 {
        return Err(Error::input("gradient check wants a batch of 1..=8"));
    }
    let mut net: Net<f64> = config.build_net(config.seed)?;
    let samples: Vec<(Vec<f64>, usize)> = batch
        .iter()
        .map(|(x, y)| (x.iter().map(|&v| v as f64).collect(), *y as usize))
        .collect();

    let loss_of = |net: &Net<f64>| -> Result<f64> {
        let mut total = 0.0;
        for (x, y) in &samples {
            let logits = net.forward(x, None)?;
            let (loss, _) = softmax_cross_entropy(&logits, *y);
            total += loss;
        }
        Ok(total / samples.len() as f64)
    };

    let mut grads = vec![0f64; net.num_params()];
    let mut cache: Vec<Vec<f64>> = Vec::new();
    for (x, y) in &samples {
        let logits = net.forward(x, Some(&mut cache))?;
        let (_, mut dlogits) = softmax_cross_entropy(&logits, *y);
        let scale = 1.0 / samples.len() as f64;
        dlogits.iter_mut().for_each(|d| *d *= scale);
        net.backward(&cache, &dlogits, &mut grads);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6a09e667f3bcc908);
    let n = net.num_params();
    let picks: Vec<usize> = (0..100.min(n)).map(|_| rng.gen_range(0..n)).collect();
    let h = 1e-5;
    let mut max_rel: f64 = 0.0;
    for &p in &picks {
        let orig = net.params()[p];
        net.params_mut()[p] = orig + h;
        let plus = loss_of(&net)?;
        net.params_mut()[p] = orig - h;
        let minus = loss_of(&net)?;
        net.params_mut()[p] = orig;
        let numeric = (plus - minus) / (2.0 * h);
        let analytic = grads[p];
        let diff = (numeric - analytic).abs();
        let rel = diff / numeric.abs().max(analytic.abs()).max(1e-6);
        if !rel.is_finite() {
            return Err(Error::input("non-finite gradient encountered"));
        }
        max_rel = max_rel.max(rel);
    }
    Ok(max_rel)
}

// ---------------------------------------------------------------------------
// Checkpoints: magic line, key=value config lines, then raw LE f32 weights.
// ---------------------------------------------------------------------------

pub fn save_checkpoint(model: &TrainedModel, path: &Path) -> Result<()> {
    let c = &model.config;
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{CHECKPOINT_MAGIC}")?;
    writeln!(out, "arch={}", c.arch)?;
    writeln!(out, "classes={}", c.num_classes)?;
    let shape: Vec<String> = c.input_shape.iter().map(|d| d.to_string()).collect();
    writeln!(out, "input={}", shape.join("x"))?;
    writeln!(out, "lr={}", c.learning_rate)?;
    writeln!(out, "max_steps={}", c.max_steps)?;
    writeln!(out, "batch={}", c.batch_size)?;
    writeln!(out, "seed={}", c.seed)?;
    writeln!(out, "steps={}", model.fit_report.steps)?;
    writeln!(out, "reinits={}", model.fit_report.reinits)?;
    writeln!(out, "weights={}", model.weights().len())?;
    for w in model.weights() {
        out.write_all(&w.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<TrainedModel> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let path_str = path.display().to_string();

    let mut pos = 0usize;
    let mut line_no = 0usize;
    fn read_line(
        bytes: &[u8],
        pos: &mut usize,
        line_no: &mut usize,
        path_str: &str,
    ) -> Result<String> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos] != b'\n' {
            *pos += 1;
        }
        if *pos >= bytes.len() {
            return Err(Error::parse(path_str, *line_no + 1, "unexpected end of file"));
        }
        let line = String::from_utf8(bytes[start..*pos].to_vec())
            .map_err(|_| Error::parse(path_str, *line_no + 1, "non-UTF8 header line"))?;
        *pos += 1;
        *line_no += 1;
        Ok(line)
    }
    if read_line(&bytes, &mut pos, &mut line_no, &path_str)? != CHECKPOINT_MAGIC {
        return Err(Error::parse(&path_str, 1, "bad checkpoint magic"));
    }
    let mut fields = std::collections::HashMap::new();
    let mut weight_count = None;
    while weight_count.is_none() {
        let line = read_line(&bytes, &mut pos, &mut line_no, &path_str)?;
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(&path_str, line_no, "expected key=value"))?;
        if k == "weights" {
            weight_count = Some(v.parse::<usize>().map_err(|_| {
                Error::parse(&path_str, line_no, "bad weight count")
            })?);
        } else {
            fields.insert(k.to_string(), v.to_string());
        }
    }
    let get = |k: &str| -> Result<&String> {
        fields
            .get(k)
            .ok_or_else(|| Error::parse(&path_str, line_no, format!("missing field `{k}`")))
    };
    let arch: Architecture = get("arch")?.parse()?;
    let input_shape: Vec<usize> = get("input")?
        .split('x')
        .map(|t| t.parse::<usize>().map_err(|_| Error::parse(&path_str, 0, "bad input shape")))
        .collect::<Result<_>>()?;
    let config = ModelConfig {
        arch,
        num_classes: get("classes")?.parse().map_err(|_| Error::parse(&path_str, 0, "bad classes"))?,
        input_shape,
        learning_rate: get("lr")?.parse().map_err(|_| Error::parse(&path_str, 0, "bad lr"))?,
        max_steps: get("max_steps")?.parse().map_err(|_| Error::parse(&path_str, 0, "bad max_steps"))?,
        batch_size: get("batch")?.parse().map_err(|_| Error::parse(&path_str, 0, "bad batch"))?,
        seed: get("seed")?.parse().map_err(|_| Error::parse(&path_str, 0, "bad seed"))?,
    };
    let fit_report = FitReport {
        steps: get("steps")?.parse().map_err(|_| Error::parse(&path_str, 0, "bad steps"))?,
        final_train_accuracy: 1.0,
        reinits: get("reinits")?.parse().map_err(|_| Error::parse(&path_str, 0, "bad reinits"))?,
    };

    let count = weight_count.unwrap();
    let body = &bytes[pos..];
    if body.len() != count * 4 {
        return Err(Error::parse(
            &path_str,
            line_no,
            format!("weight payload has {} bytes, expected {}", body.len(), count * 4),
        ));
    }
    let weights: Vec<f32> = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let mut net: Net<f32> = config.build_net(config.seed)?;
    net.set_params(&weights)?;
    Ok(TrainedModel {
        config,
        net,
        fit_report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticKind, SyntheticSpec};
    use tempfile::tempdir;

    fn small_pool() -> LabeledPool {
        generate_synthetic(&SyntheticSpec {
            kind: SyntheticKind::Gauss2,
            n_samples: 40,
            noise: 0.05,
            seed: 3,
        })
        .unwrap()
    }

    fn mlp_config(hidden: usize, pool: &LabeledPool) -> ModelConfig {
        let mut c = ModelConfig::new(
            Architecture::Mlp(vec![hidden]),
            pool.num_classes().max(2),
            pool.shape().to_vec(),
        );
        c.seed = 7;
        c
    }

    #[test]
    fn fits_small_subsets_to_perfection() {
        let pool = small_pool();
        let ids: Vec<u32> = (0..20).collect();
        let model = train_to_fit(&pool, &ids, &mlp_config(16, &pool)).unwrap();
        assert_eq!(model.fit_report.final_train_accuracy, 1.0);
        for &id in &ids {
            let i = pool.index_of_id(id).unwrap();
            assert_eq!(model.predict(pool.sample(i)).unwrap(), pool.label(i));
        }
    }

    #[test]
    fn training_is_bit_deterministic() {
        let pool = small_pool();
        let ids: Vec<u32> = (0..20).collect();
        let config = mlp_config(16, &pool);
        let a = train_to_fit(&pool, &ids, &config).unwrap();
        let b = train_to_fit(&pool, &ids, &config).unwrap();
        assert_eq!(a.weights(), b.weights());
        assert_eq!(a.fit_report, b.fit_report);
    }

    #[test]
    fn empty_or_unknown_subset_is_an_input_error() {
        let pool = small_pool();
        let config = mlp_config(8, &pool);
        assert!(train_to_fit(&pool, &[], &config).is_err());
        assert!(train_to_fit(&pool, &[9999], &config).is_err());
    }

    #[test]
    fn gradient_check_mlp_is_tight() {
        let pool = small_pool();
        let config = mlp_config(16, &pool);
        let batch: Vec<(Vec<f32>, u8)> = (0..4)
            .map(|i| (pool.sample(i).to_vec(), pool.label(i)))
            .collect();
        let err = gradient_check(&config, &batch).unwrap();
        assert!(err < 1e-4, "max relative error {err}");
    }

    #[test]
    fn gradient_check_survives_zero_input() {
        let pool = small_pool();
        let config = mlp_config(16, &pool);
        let batch = vec![(vec![0.0f32; 2], 0u8), (vec![0.0f32; 2], 1u8)];
        let err = gradient_check(&config, &batch).unwrap();
        assert!(err.is_finite());
    }

    #[test]
    fn loss_mostly_decreases_on_a_fixed_batch() {
        let pool = small_pool();
        let mut ok = 0;
        let n_seeds = 10;
        for seed in 0..n_seeds {
            let mut config = mlp_config(16, &pool);
            config.seed = seed;
            config.batch_size = 32;
            let mut net: Net<f32> = config.build_net(seed).unwrap();
            let mut adam: Adam<f32> = Adam::new(net.num_params(), config.learning_rate);
            let indices: Vec<usize> = (0..32).collect();
            let mut losses = Vec::new();
            let mut grads = vec![0f32; net.num_params()];
            let mut cache = Vec::new();
            for _ in 0..150 {
                grads.iter_mut().for_each(|g| *g = 0.0);
                let mut total = 0f32;
                for &i in &indices {
                    let logits = net.forward(pool.sample(i), Some(&mut cache)).unwrap();
                    let (loss, mut d) = softmax_cross_entropy(&logits, pool.label(i) as usize);
                    total += loss;
                    d.iter_mut().for_each(|v| *v /= indices.len() as f32);
                    net.backward(&cache, &d, &mut grads);
                }
                losses.push(total / indices.len() as f32);
                adam.step(net.params_mut(), &grads);
            }
            let windows_ok = (0..losses.len() - 50).all(|i| losses[i + 50] <= losses[i] + 1e-5);
            if windows_ok {
                ok += 1;
            }
        }
        assert!(ok * 100 >= n_seeds * 95, "only {ok}/{n_seeds} seeds were monotone");
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let pool = small_pool();
        let ids: Vec<u32> = (0..20).collect();
        let model = train_to_fit(&pool, &ids, &mlp_config(8, &pool)).unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("model.sgnn");
        save_checkpoint(&model, &path).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        assert_eq!(loaded.config, model.config);
        assert_eq!(loaded.weights(), model.weights());

        let path2 = dir.path().join("model2.sgnn");
        save_checkpoint(&loaded, &path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn architecture_strings_round_trip() {
        for s in ["mlp:100", "mlp:64,32", "conv:50"] {
            let a: Architecture = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert!("resnet:50".parse::<Architecture>().is_err());
        assert!("mlp:0".parse::<Architecture>().is_err());
    }
}
