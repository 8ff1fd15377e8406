use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use richelot::arith::{fmt_rational, parse_rational, PlaceSet};
use richelot::ctp::{DescentReport, PipelineReport};
use richelot::curve::{factored, RichelotPair};
use richelot::localfield::LocalPlace;
use richelot::localpoints::{ImageStatus, LocalImageRecord, LocalImages, SearchConfig};
use richelot::poly::Poly;
use richelot::selmer::SelmerGroup;

use crate::CliError;

/// Input: `y^2 = lambda G1 G2 G3` with coefficients listed from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub lambda: String,
    #[serde(rename = "G1")]
    pub g1: Vec<String>,
    #[serde(rename = "G2")]
    pub g2: Vec<String>,
    #[serde(rename = "G3")]
    pub g3: Vec<String>,
}

impl CurveFile {
    pub fn read(path: &Path) -> Result<CurveFile, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn of_curve(curve: &RichelotPair, label: Option<String>) -> CurveFile {
        let coeffs = |p: &Poly| p.coeffs().iter().map(fmt_rational).collect();
        let g = curve.g();
        CurveFile {
            label,
            lambda: "1".into(),
            g1: coeffs(&g[0]),
            g2: coeffs(&g[1]),
            g3: coeffs(&g[2]),
        }
    }

    pub fn build(&self) -> Result<RichelotPair, CliError> {
        let poly = |name: &str, c: &[String]| -> Result<Poly, CliError> {
            if c.is_empty() || c.len() > 3 {
                return Err(CliError::Input(format!("{name} needs 1 to 3 coefficients, got {}", c.len())));
            }
            let coeffs = c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
            Ok(Poly::new(coeffs))
        };
        let lambda = parse_rational(&self.lambda)?;
        Ok(RichelotPair::build(
            &lambda,
            &poly("G1", &self.g1)?,
            &poly("G2", &self.g2)?,
            &poly("G3", &self.g3)?,
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalized {
    pub lambda: String,
    pub g: Vec<String>,
    pub roots: Vec<String>,
    pub moved_root: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codomain {
    pub delta: String,
    pub l: Vec<String>,
    pub l_coefficients: Vec<Vec<String>>,
    pub kernel: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerSection {
    pub dim: usize,
    pub basis: Vec<String>,
    pub torsion_images: Vec<String>,
    pub status: ImageStatus,
}

impl SelmerSection {
    fn of(s: &SelmerGroup) -> SelmerSection {
        SelmerSection {
            dim: s.dim(),
            basis: s.basis.iter().map(|t| t.to_string()).collect(),
            torsion_images: s.torsion_images.iter().map(|t| t.to_string()).collect(),
            status: s.status,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selmer {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phihat: Option<SelmerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<SelmerSection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceEntries {
    pub place: String,
    pub entries: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalColumn {
    pub place: String,
    pub point: String,
    pub delta2: String,
    pub lift: String,
    pub difference: String,
    pub rho: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalTable {
    pub a: String,
    pub global_lift: String,
    pub columns: Vec<LocalColumn>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub places: Vec<String>,
    pub basis: Vec<String>,
    /// 1 where the pairing is -1.
    pub entries: Vec<Vec<u8>>,
    pub per_place: Vec<PlaceEntries>,
    pub symmetric: bool,
    pub radical: Vec<String>,
    pub radical_dim: usize,
    pub tables: Vec<LocalTable>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Status {
    pub certified: bool,
    pub partial: bool,
    pub torsion_in_radical: Option<bool>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub search: SearchConfig,
    pub places: Option<Vec<u64>>,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub curve: CurveFile,
    pub normalized: Normalized,
    pub codomain: Codomain,
    pub places: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selmer: Option<Selmer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Pairing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descent: Option<DescentReport>,
    pub status: Status,
    pub config: ConfigEcho,
}

fn place_names(places: &PlaceSet) -> Vec<String> {
    places.places().iter().map(|v| v.to_string()).collect()
}

impl ReportFile {
    /// Curve and codomain only.
    pub fn base(file: &CurveFile, curve: &RichelotPair, config: ConfigEcho) -> Result<ReportFile, CliError> {
        let coeffs = |p: &Poly| p.coeffs().iter().map(fmt_rational).collect();
        Ok(ReportFile {
            curve: file.clone(),
            normalized: Normalized {
                lambda: fmt_rational(curve.lambda()),
                g: curve.g().iter().map(|p| p.to_string()).collect(),
                roots: curve.roots().iter().map(fmt_rational).collect(),
                moved_root: curve.moved_root().map(fmt_rational),
            },
            codomain: Codomain {
                delta: fmt_rational(curve.delta()),
                l: curve.l().iter().map(factored).collect(),
                l_coefficients: curve.l().iter().map(coeffs).collect(),
                kernel: curve.kernel().iter().map(|t| t.to_string()).collect(),
            },
            places: place_names(&curve.bad_places()?),
            selmer: None,
            pairing: None,
            descent: None,
            status: Status {
                certified: true,
                partial: false,
                torsion_in_radical: None,
                warnings: Vec::new(),
            },
            config,
        })
    }

    pub fn with_selmer(mut self, phihat: Option<&SelmerGroup>, phi: Option<&SelmerGroup>) -> ReportFile {
        self.status.certified = [phihat, phi]
            .iter()
            .flatten()
            .all(|s| s.status == ImageStatus::Certified);
        self.selmer = Some(Selmer {
            phihat: phihat.map(SelmerSection::of),
            phi: phi.map(SelmerSection::of),
        });
        self
    }

    pub fn with_pipeline(self, report: &PipelineReport, pairing_places: &PlaceSet) -> ReportFile {
        let mut out = self.with_selmer(Some(&report.sel_phihat), Some(&report.sel_phi));
        let m = &report.matrix;
        let tables = m
            .prepared
            .iter()
            .map(|p| LocalTable {
                a: p.a.to_string(),
                global_lift: p.lift.to_string(),
                columns: p
                    .steps
                    .iter()
                    .map(|s| LocalColumn {
                        place: s.place.to_string(),
                        point: s.point_text.clone(),
                        delta2: s.delta2.to_string(),
                        lift: s.lift.to_string(),
                        difference: s.difference.to_string(),
                        rho: s.rho.to_string(),
                    })
                    .collect(),
            })
            .collect();
        out.pairing = Some(Pairing {
            places: place_names(pairing_places),
            basis: m.basis.iter().map(|t| t.to_string()).collect(),
            entries: m.entries.clone(),
            per_place: m
                .per_place
                .iter()
                .map(|(v, e)| PlaceEntries {
                    place: v.to_string(),
                    entries: e.clone(),
                })
                .collect(),
            symmetric: m.symmetric,
            radical: m.radical.iter().map(|t| t.to_string()).collect(),
            radical_dim: m.radical_dim(),
            tables,
        });
        out.descent = Some(report.bounds.clone());
        out.status = Status {
            certified: report.status == ImageStatus::Certified,
            partial: report.partial,
            torsion_in_radical: Some(report.torsion_in_radical),
            warnings: report.warnings.clone(),
        };
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }
}

/// Local image witnesses kept between runs, one entry per (curve, config).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Cache {
    entries: Vec<CacheEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CacheEntry {
    curve: String,
    config: SearchConfig,
    records: Vec<LocalImageRecord>,
}

impl Cache {
    fn path(dir: &Path) -> PathBuf {
        dir.join("local-images.json")
    }

    pub fn load(dir: &Path) -> Result<Cache, CliError> {
        let path = Cache::path(dir);
        if !path.exists() {
            return Ok(Cache::default());
        }
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    /// Seed `images` with cached witnesses; they are re-verified on import.
    pub fn restore(&self, images: &LocalImages) -> Result<bool, CliError> {
        let key = images.curve().to_string();
        match self.entries.iter().find(|e| e.curve == key && e.config == *images.config()) {
            Some(e) => {
                images.import(&e.records)?;
                Ok(true)
            }
            None => Ok(false),
        }
    }

    pub fn store(mut self, dir: &Path, images: &LocalImages) -> Result<(), CliError> {
        let key = images.curve().to_string();
        let records = images.export();
        self.entries.retain(|e| !(e.curve == key && e.config == *images.config()));
        self.entries.push(CacheEntry {
            curve: key,
            config: images.config().clone(),
            records,
        });
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = Cache::path(dir);
        let text = serde_json::to_string(&self).expect("cache serializes");
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

pub fn parse_places(text: &str) -> Result<PlaceSet, CliError> {
    let mut primes = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match LocalPlace::parse(part) {
            Some(LocalPlace::Finite(p)) => primes.push(p),
            Some(LocalPlace::Infinite) => {}
            None => return Err(CliError::Input(format!("bad place {part:?}"))),
        }
    }
    Ok(PlaceSet::new(primes))
}
