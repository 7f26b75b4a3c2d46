//! Dataset ingestion and persistence: IDX files, synthetic pools, PGM
//! images and the FNV digest that ties manifests to the pool they came from.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const IDX_IMAGES_MAGIC: u32 = 2051;
pub const IDX_LABELS_MAGIC: u32 = 2049;

/// An immutable labeled sample pool. Features are normalized to `[0, 1]`;
/// `ids` are stable indices into the source dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPool {
    features: Vec<f32>,
    shape: Vec<usize>,
    labels: Vec<u8>,
    ids: Vec<u32>,
    digest: u64,
}

impl LabeledPool {
    pub fn new(
        features: Vec<f32>,
        shape: Vec<usize>,
        labels: Vec<u8>,
        ids: Vec<u32>,
    ) -> Result<Self> {
        let feature_len: usize = shape.iter().product();
        if feature_len == 0 {
            return Err(Error::input("sample shape must be non-empty"));
        }
        if labels.len() != ids.len() || features.len() != labels.len() * feature_len {
            return Err(Error::input(format!(
                "inconsistent pool sizes: {} feature values, {} labels, {} ids, {} per sample",
                features.len(),
                labels.len(),
                ids.len(),
                feature_len
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(ids.len());
        if let Some(dup) = ids.iter().find(|id| !seen.insert(**id)) {
            return Err(Error::input(format!("duplicate sample id {dup}")));
        }
        let digest = pool_digest(&features, &labels);
        Ok(LabeledPool {
            features,
            shape,
            labels,
            ids,
            digest,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn feature_len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn sample(&self, index: usize) -> &[f32] {
        let n = self.feature_len();
        &self.features[index * n..(index + 1) * n]
    }

    pub fn label(&self, index: usize) -> u8 {
        self.labels[index]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn id(&self, index: usize) -> u32 {
        self.ids[index]
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    pub fn index_of_id(&self, id: u32) -> Option<usize> {
        // ids are usually 0..N in file order; fall back to a scan otherwise
        if let Some(&candidate) = self.ids.get(id as usize) {
            if candidate == id {
                return Some(id as usize);
            }
        }
        self.ids.iter().position(|&i| i == id)
    }

    pub fn num_classes(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m as usize + 1)
    }

    /// 64-bit FNV-1a over the payload (feature bytes then labels).
    pub fn digest(&self) -> u64 {
        self.digest
    }

    /// A new pool holding the first `n` samples.
    pub fn take_first(&self, n: usize) -> Result<LabeledPool> {
        if n == 0 || n > self.len() {
            return Err(Error::input(format!(
                "subset of {n} samples out of range 1..={}",
                self.len()
            )));
        }
        LabeledPool::new(
            self.features[..n * self.feature_len()].to_vec(),
            self.shape.clone(),
            self.labels[..n].to_vec(),
            self.ids[..n].to_vec(),
        )
    }
}

fn pool_digest(features: &[f32], labels: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |b: u8| {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    };
    for f in features {
        for b in f.to_le_bytes() {
            eat(b);
        }
    }
    for &b in labels {
        eat(b);
    }
    h
}

// ---------------------------------------------------------------------------
// IDX (big-endian MNIST container)
// ---------------------------------------------------------------------------

struct IdxReader {
    path: PathBuf,
    reader: BufReader<File>,
    offset: u64,
}

impl IdxReader {
    fn open(path: &Path) -> Result<Self> {
        Ok(IdxReader {
            path: path.to_path_buf(),
            reader: BufReader::new(File::open(path)?),
            offset: 0,
        })
    }

    fn read_u32(&mut self, what: &str) -> Result<u32> {
        let mut buf = [0u8; 4];
        let at = self.offset;
        self.reader.read_exact(&mut buf).map_err(|_| Error::Idx {
            path: self.path.clone(),
            offset: at,
            msg: format!("truncated while reading {what}"),
        })?;
        self.offset += 4;
        Ok(u32::from_be_bytes(buf))
    }

    fn read_payload(&mut self, len: usize) -> Result<Vec<u8>> {
        let mut buf = vec![0u8; len];
        let at = self.offset;
        self.reader.read_exact(&mut buf).map_err(|_| Error::Idx {
            path: self.path.clone(),
            offset: at,
            msg: format!("truncated payload, expected {len} bytes"),
        })?;
        self.offset += len as u64;
        // trailing garbage counts as a malformed file
        let mut probe = [0u8; 1];
        if self.reader.read(&mut probe)? != 0 {
            return Err(Error::Idx {
                path: self.path.clone(),
                offset: self.offset,
                msg: "unexpected bytes after payload".into(),
            });
        }
        Ok(buf)
    }
}

/// Loads an MNIST-style image/label IDX pair. Pixels are scaled to `[0, 1]`
/// by dividing by 255; ids are `0..N-1` in file order.
pub fn load_idx(path_images: &Path, path_labels: &Path) -> Result<LabeledPool> {
    let mut img = IdxReader::open(path_images)?;
    let magic = img.read_u32("magic")?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::Idx {
            path: img.path.clone(),
            offset: 0,
            msg: format!("bad image magic {magic}, expected {IDX_IMAGES_MAGIC}"),
        });
    }
    let n = img.read_u32("image count")? as usize;
    let rows = img.read_u32("row count")? as usize;
    let cols = img.read_u32("column count")? as usize;
    let pixels = img.read_payload(n * rows * cols)?;

    let mut lab = IdxReader::open(path_labels)?;
    let magic = lab.read_u32("magic")?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::Idx {
            path: lab.path.clone(),
            offset: 0,
            msg: format!("bad label magic {magic}, expected {IDX_LABELS_MAGIC}"),
        });
    }
    let n_labels = lab.read_u32("label count")? as usize;
    if n_labels != n {
        return Err(Error::Idx {
            path: lab.path.clone(),
            offset: 4,
            msg: format!("label count {n_labels} does not match image count {n}"),
        });
    }
    let labels = lab.read_payload(n)?;

    let features: Vec<f32> = pixels.iter().map(|&b| b as f32 / 255.0).collect();
    let ids: Vec<u32> = (0..n as u32).collect();
    LabeledPool::new(features, vec![rows, cols], labels, ids)
}

/// Writes a pool back to an IDX pair. Pixels are quantized with
/// `round(value * 255)`; a pool that came from `load_idx` round-trips
/// byte-exactly.
pub fn save_idx(pool: &LabeledPool, path_images: &Path, path_labels: &Path) -> Result<()> {
    if pool.shape().len() != 2 {
        return Err(Error::input(
            "IDX export needs 2-d (rows x cols) samples",
        ));
    }
    let (rows, cols) = (pool.shape()[0], pool.shape()[1]);
    let mut img = BufWriter::new(File::create(path_images)?);
    img.write_all(&IDX_IMAGES_MAGIC.to_be_bytes())?;
    img.write_all(&(pool.len() as u32).to_be_bytes())?;
    img.write_all(&(rows as u32).to_be_bytes())?;
    img.write_all(&(cols as u32).to_be_bytes())?;
    for i in 0..pool.len() {
        let bytes: Vec<u8> = pool
            .sample(i)
            .iter()
            .map(|&f| (f * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect();
        img.write_all(&bytes)?;
    }
    img.flush()?;

    let mut lab = BufWriter::new(File::create(path_labels)?);
    lab.write_all(&IDX_LABELS_MAGIC.to_be_bytes())?;
    lab.write_all(&(pool.len() as u32).to_be_bytes())?;
    lab.write_all(pool.labels())?;
    lab.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Synthetic pools
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// Two 2-d Gaussian blobs, one per class.
    Gauss2,
    /// Two concentric rings around the center, one per class.
    Rings,
    /// All bit vectors of the given width; label is the parity. Exhaustive:
    /// always yields `2^bits` samples and ignores the noise knob.
    ParityBits(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n_samples: usize,
    pub noise: f64,
    pub seed: u64,
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<LabeledPool> {
    if spec.noise < 0.0 {
        return Err(Error::input("noise must be non-negative"));
    }
    match spec.kind {
        SyntheticKind::Gauss2 => gauss2(spec),
        SyntheticKind::Rings => rings(spec),
        SyntheticKind::ParityBits(bits) => parity_bits(bits),
    }
}

fn gauss2(spec: &SyntheticSpec) -> Result<LabeledPool> {
    if spec.n_samples < 2 {
        return Err(Error::input("gauss2 needs at least one sample per class"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers = [[0.3f64, 0.3], [0.7, 0.7]];
    let mut features = Vec::with_capacity(spec.n_samples * 2);
    let mut labels = Vec::with_capacity(spec.n_samples);
    for i in 0..spec.n_samples {
        let class = (i % 2) as u8;
        for d in 0..2 {
            let v = centers[class as usize][d] + gaussian(&mut rng) * spec.noise;
            features.push(v.clamp(0.0, 1.0) as f32);
        }
        labels.push(class);
    }
    let ids = (0..spec.n_samples as u32).collect();
    LabeledPool::new(features, vec![2], labels, ids)
}

fn rings(spec: &SyntheticSpec) -> Result<LabeledPool> {
    if spec.n_samples < 2 {
        return Err(Error::input("rings needs at least one sample per class"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let radii = [0.15f64, 0.35];
    let mut features = Vec::with_capacity(spec.n_samples * 2);
    let mut labels = Vec::with_capacity(spec.n_samples);
    for i in 0..spec.n_samples {
        let class = (i % 2) as u8;
        let angle = rng.gen::<f64>() * std::f64::consts::TAU;
        let r = radii[class as usize] + gaussian(&mut rng) * spec.noise;
        let x = 0.5 + r * angle.cos();
        let y = 0.5 + r * angle.sin();
        features.push(x.clamp(0.0, 1.0) as f32);
        features.push(y.clamp(0.0, 1.0) as f32);
        labels.push(class);
    }
    let ids = (0..spec.n_samples as u32).collect();
    LabeledPool::new(features, vec![2], labels, ids)
}

fn parity_bits(bits: u32) -> Result<LabeledPool> {
    if bits == 0 || bits > 16 {
        return Err(Error::input("parity needs 1..=16 bits"));
    }
    let n = 1usize << bits;
    let mut features = Vec::with_capacity(n * bits as usize);
    let mut labels = Vec::with_capacity(n);
    for v in 0..n as u32 {
        for b in 0..bits {
            features.push((v >> b & 1) as f32);
        }
        labels.push((v.count_ones() % 2) as u8);
    }
    let ids = (0..n as u32).collect();
    LabeledPool::new(features, vec![bits as usize], labels, ids)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

// ---------------------------------------------------------------------------
// PGM images (binary P5)
// ---------------------------------------------------------------------------

pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    if pixels.len() != width * height {
        return Err(Error::input(format!(
            "PGM payload has {} bytes, expected {}x{}",
            pixels.len(),
            width,
            height
        )));
    }
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{width} {height}\n255\n")?;
    out.write_all(pixels)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn tiny_pool() -> LabeledPool {
        // 4 samples of 2x2 "pixels" on the /255 grid
        let pixels: Vec<u8> = (0..16).map(|i| (i * 16) as u8).collect();
        let features: Vec<f32> = pixels.iter().map(|&b| b as f32 / 255.0).collect();
        LabeledPool::new(features, vec![2, 2], vec![0, 1, 2, 3], vec![0, 1, 2, 3]).unwrap()
    }

    #[test]
    fn idx_round_trip_is_bit_exact() {
        let dir = tempdir().unwrap();
        let img = dir.path().join("img");
        let lab = dir.path().join("lab");
        let pool = tiny_pool();
        save_idx(&pool, &img, &lab).unwrap();
        let loaded = load_idx(&img, &lab).unwrap();
        assert_eq!(loaded, pool);

        let img2 = dir.path().join("img2");
        let lab2 = dir.path().join("lab2");
        save_idx(&loaded, &img2, &lab2).unwrap();
        assert_eq!(std::fs::read(&img).unwrap(), std::fs::read(&img2).unwrap());
        assert_eq!(std::fs::read(&lab).unwrap(), std::fs::read(&lab2).unwrap());
    }

    #[test]
    fn idx_rejects_malformed_headers() {
        let dir = tempdir().unwrap();
        let img = dir.path().join("img");
        let lab = dir.path().join("lab");
        save_idx(&tiny_pool(), &img, &lab).unwrap();

        // canonical magic bytes 00 00 08 03 parse as 2051
        let bytes = std::fs::read(&img).unwrap();
        assert_eq!(&bytes[..4], &[0, 0, 8, 3]);

        // labels file offered as images: wrong kind
        let err = load_idx(&lab, &img).unwrap_err();
        assert!(err.to_string().contains("bad image magic"), "{err}");

        // image file offered as labels: wrong kind
        let err = load_idx(&img, &img).unwrap_err();
        assert!(err.to_string().contains("bad label magic"), "{err}");

        // truncated payload
        let mut cut = bytes.clone();
        cut.truncate(bytes.len() - 3);
        std::fs::write(dir.path().join("cut"), &cut).unwrap();
        let err = load_idx(&dir.path().join("cut"), &lab).unwrap_err();
        assert!(err.to_string().contains("truncated"), "{err}");

        // count mismatch
        let mut lab_bytes = std::fs::read(&lab).unwrap();
        lab_bytes[7] = 9;
        std::fs::write(dir.path().join("lab9"), &lab_bytes).unwrap();
        let err = load_idx(&img, &dir.path().join("lab9")).unwrap_err();
        assert!(err.to_string().contains("does not match"), "{err}");
    }

    #[test]
    fn digest_is_pure_and_path_independent() {
        let dir = tempdir().unwrap();
        let a = dir.path().join("a-images");
        let al = dir.path().join("a-labels");
        let b = dir.path().join("some/other/name-images");
        std::fs::create_dir_all(b.parent().unwrap()).unwrap();
        let bl = b.with_file_name("name-labels");
        let pool = tiny_pool();
        save_idx(&pool, &a, &al).unwrap();
        save_idx(&pool, &b, &bl).unwrap();
        assert_eq!(
            load_idx(&a, &al).unwrap().digest(),
            load_idx(&b, &bl).unwrap().digest()
        );
    }

    #[test]
    fn gauss2_is_balanced_and_deterministic() {
        let spec = SyntheticSpec {
            kind: SyntheticKind::Gauss2,
            n_samples: 400,
            noise: 0.08,
            seed: 1,
        };
        let pool = generate_synthetic(&spec).unwrap();
        assert_eq!(pool.len(), 400);
        let ones = pool.labels().iter().filter(|&&l| l == 1).count();
        assert_eq!(ones, 200);
        assert_eq!(generate_synthetic(&spec).unwrap(), pool);
        assert!(pool
            .sample(0)
            .iter()
            .all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn parity_enumerates_all_vectors() {
        let pool = generate_synthetic(&SyntheticSpec {
            kind: SyntheticKind::ParityBits(4),
            n_samples: 0,
            noise: 0.0,
            seed: 0,
        })
        .unwrap();
        assert_eq!(pool.len(), 16);
        let mut seen = std::collections::HashSet::new();
        for i in 0..16 {
            let bits: Vec<u8> = pool.sample(i).iter().map(|&f| f as u8).collect();
            let parity = bits.iter().filter(|&&b| b == 1).count() % 2;
            assert_eq!(pool.label(i) as usize, parity);
            assert!(seen.insert(bits));
        }
    }

    #[test]
    fn take_first_rebinds_digest() {
        let pool = tiny_pool();
        let sub = pool.take_first(2).unwrap();
        assert_eq!(sub.len(), 2);
        assert_ne!(sub.digest(), pool.digest());
        assert!(pool.take_first(0).is_err());
        assert!(pool.take_first(5).is_err());
    }
}
