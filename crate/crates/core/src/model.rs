//! Domain vocabulary: ASIL levels, Severity/Exposure/Controllability ratings,
//! element and relation type registries, and the S-E-C to ASIL risk table.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Token used for any unassigned rating in every input and output format.
pub const UNASSIGNED_TOKEN: &str = "-";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unrecognized ASIL token `{0}`")]
    Asil(String),
    #[error("unrecognized {component} token `{token}`")]
    Sec {
        component: SecComponent,
        token: String,
    },
    #[error("incomplete S-E-C")]
    IncompleteSec,
    #[error("risk table is missing entry `{0}`")]
    MissingRiskEntry(String),
    #[error("risk table has unknown key `{0}`")]
    UnknownRiskKey(String),
    #[error("risk table entry `{key}` must be an assigned ASIL")]
    UnassignedRiskEntry { key: String },
    #[error("malformed risk table document: {0}")]
    RiskDocument(String),
}

fn is_unassigned_token(token: &str) -> bool {
    token.is_empty() || token == UNASSIGNED_TOKEN
}

/// Automotive Safety Integrity Level of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AsilValue {
    #[default]
    Unassigned,
    Qm,
    A,
    B,
    C,
    D,
}

impl AsilValue {
    pub const ALL: [AsilValue; 6] = [
        AsilValue::Qm,
        AsilValue::A,
        AsilValue::B,
        AsilValue::C,
        AsilValue::D,
        AsilValue::Unassigned,
    ];

    /// QM=0 < A=1 < B=2 < C=3 < D=4. Unassigned has no rank.
    pub fn rank(self) -> Option<u8> {
        match self {
            AsilValue::Unassigned => None,
            AsilValue::Qm => Some(0),
            AsilValue::A => Some(1),
            AsilValue::B => Some(2),
            AsilValue::C => Some(3),
            AsilValue::D => Some(4),
        }
    }

    pub fn from_rank(rank: u8) -> Option<AsilValue> {
        match rank {
            0 => Some(AsilValue::Qm),
            1 => Some(AsilValue::A),
            2 => Some(AsilValue::B),
            3 => Some(AsilValue::C),
            4 => Some(AsilValue::D),
            _ => None,
        }
    }

    pub fn is_assigned(self) -> bool {
        self != AsilValue::Unassigned
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AsilValue::Unassigned => UNASSIGNED_TOKEN,
            AsilValue::Qm => "QM",
            AsilValue::A => "A",
            AsilValue::B => "B",
            AsilValue::C => "C",
            AsilValue::D => "D",
        }
    }
}

/// Case-insensitive, whitespace-trimmed. `-` and the empty string mean unassigned.
pub fn parse_asil(token: &str) -> Result<AsilValue, ModelError> {
    let t = token.trim();
    if is_unassigned_token(t) {
        return Ok(AsilValue::Unassigned);
    }
    match t.to_ascii_uppercase().as_str() {
        "QM" => Ok(AsilValue::Qm),
        "A" => Ok(AsilValue::A),
        "B" => Ok(AsilValue::B),
        "C" => Ok(AsilValue::C),
        "D" => Ok(AsilValue::D),
        _ => Err(ModelError::Asil(token.to_string())),
    }
}

/// Orders two ASILs by rank. `None` means unordered: at least one side is unassigned.
pub fn compare_asil(a: AsilValue, b: AsilValue) -> Option<Ordering> {
    Some(a.rank()?.cmp(&b.rank()?))
}

impl fmt::Display for AsilValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AsilValue {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_asil(s)
    }
}

impl Serialize for AsilValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for AsilValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_asil(&s).map_err(serde::de::Error::custom)
    }
}

/// Which of the three S-E-C components a value or finding refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SecComponent {
    Severity,
    Exposure,
    Controllability,
}

impl SecComponent {
    pub const ALL: [SecComponent; 3] = [
        SecComponent::Severity,
        SecComponent::Exposure,
        SecComponent::Controllability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SecComponent::Severity => "severity",
            SecComponent::Exposure => "exposure",
            SecComponent::Controllability => "controllability",
        }
    }
}

impl fmt::Display for SecComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! sec_level {
    ($(#[$doc:meta])* $name:ident, $component:expr, [$($variant:ident = $level:literal),+]) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
        pub enum $name {
            #[default]
            Unassigned,
            $($variant),+
        }

        impl $name {
            pub const LEVELS: &'static [$name] = &[$($name::$variant),+];

            pub fn level(self) -> Option<u8> {
                match self {
                    $name::Unassigned => None,
                    $($name::$variant => Some($level)),+
                }
            }

            pub fn from_level(level: u8) -> Option<$name> {
                match level {
                    $($level => Some($name::$variant),)+
                    _ => None,
                }
            }

            pub fn is_assigned(self) -> bool {
                self != $name::Unassigned
            }

            pub fn as_str(self) -> &'static str {
                match self {
                    $name::Unassigned => UNASSIGNED_TOKEN,
                    $($name::$variant => stringify!($variant)),+
                }
            }

            pub fn parse(token: &str) -> Result<$name, ModelError> {
                let t = token.trim();
                if is_unassigned_token(t) {
                    return Ok($name::Unassigned);
                }
                let upper = t.to_ascii_uppercase();
                $(if upper == stringify!($variant) {
                    return Ok($name::$variant);
                })+
                Err(ModelError::Sec {
                    component: $component,
                    token: token.to_string(),
                })
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                $name::parse(&s).map_err(serde::de::Error::custom)
            }
        }
    };
}

sec_level!(
    /// Severity rating, S0 (no injuries) to S3.
    Severity, SecComponent::Severity, [S0 = 0, S1 = 1, S2 = 2, S3 = 3]
);
sec_level!(
    /// Exposure rating, E0 to E4.
    Exposure, SecComponent::Exposure, [E0 = 0, E1 = 1, E2 = 2, E3 = 3, E4 = 4]
);
sec_level!(
    /// Controllability rating, C0 to C3.
    Controllability, SecComponent::Controllability, [C0 = 0, C1 = 1, C2 = 2, C3 = 3]
);

/// The S-E-C decomposition of an element's risk. Components are independently optional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SecTriple {
    #[serde(default)]
    pub severity: Severity,
    #[serde(default)]
    pub exposure: Exposure,
    #[serde(default)]
    pub controllability: Controllability,
}

impl SecTriple {
    pub fn new(severity: Severity, exposure: Exposure, controllability: Controllability) -> Self {
        SecTriple {
            severity,
            exposure,
            controllability,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.severity.is_assigned() && self.exposure.is_assigned() && self.controllability.is_assigned()
    }

    pub fn is_unassigned(&self) -> bool {
        !self.severity.is_assigned() && !self.exposure.is_assigned() && !self.controllability.is_assigned()
    }

    /// Rendered token of one component (`-` when unassigned).
    pub fn component(&self, component: SecComponent) -> &'static str {
        match component {
            SecComponent::Severity => self.severity.as_str(),
            SecComponent::Exposure => self.exposure.as_str(),
            SecComponent::Controllability => self.controllability.as_str(),
        }
    }

    pub fn component_assigned(&self, component: SecComponent) -> bool {
        match component {
            SecComponent::Severity => self.severity.is_assigned(),
            SecComponent::Exposure => self.exposure.is_assigned(),
            SecComponent::Controllability => self.controllability.is_assigned(),
        }
    }

    /// Levels as (s, e, c) when complete.
    pub fn levels(&self) -> Option<(u8, u8, u8)> {
        Some((
            self.severity.level()?,
            self.exposure.level()?,
            self.controllability.level()?,
        ))
    }
}

impl fmt::Display for SecTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.severity, self.exposure, self.controllability)
    }
}

pub fn parse_sec(s_token: &str, e_token: &str, c_token: &str) -> Result<SecTriple, ModelError> {
    Ok(SecTriple {
        severity: Severity::parse(s_token)?,
        exposure: Exposure::parse(e_token)?,
        controllability: Controllability::parse(c_token)?,
    })
}

/// A registered element type such as `HzE`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementType {
    pub label: String,
    pub description: String,
}

/// A registered relation with the element types it is expected to connect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationType {
    pub label: String,
    pub subject_type: String,
    pub object_type: String,
}

/// Open registry of element and relation types. Unknown labels are admitted by
/// the ingestion layer and surface as validation warnings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    types: Vec<ElementType>,
    relations: Vec<RelationType>,
    aliases: BTreeMap<String, String>,
}

impl Default for Registry {
    fn default() -> Self {
        let types = [
            ("SB", "System Behavior"),
            ("MB", "Malfunctioning Behavior"),
            ("HzE", "Hazardous Event"),
            ("SG", "Safety Goal"),
            ("FSR", "Functional Safety Requirement"),
            ("TSR", "Technical Safety Requirement"),
        ]
        .into_iter()
        .map(|(label, description)| ElementType {
            label: label.to_string(),
            description: description.to_string(),
        })
        .collect();
        let relations = [
            ("relatedMB", "SB", "MB"),
            ("associatedHE", "MB", "HzE"),
            ("associatedSG", "HzE", "SG"),
            ("associatedFSR", "SG", "FSR"),
            ("associatedTSR", "FSR", "TSR"),
            ("relatedFSR", "FSR", "FSR"),
            ("relatedTSR", "TSR", "TSR"),
        ]
        .into_iter()
        .map(|(label, subject, object)| RelationType {
            label: label.to_string(),
            subject_type: subject.to_string(),
            object_type: object.to_string(),
        })
        .collect();
        let aliases = BTreeMap::from([("associatedSafetyGoal".to_string(), "associatedSG".to_string())]);
        Registry {
            types,
            relations,
            aliases,
        }
    }
}

impl Registry {
    pub fn new(types: Vec<ElementType>, relations: Vec<RelationType>, aliases: BTreeMap<String, String>) -> Self {
        Registry {
            types,
            relations,
            aliases,
        }
    }

    pub fn types(&self) -> &[ElementType] {
        &self.types
    }

    pub fn relations(&self) -> &[RelationType] {
        &self.relations
    }

    pub fn element_type(&self, label: &str) -> Option<&ElementType> {
        self.types.iter().find(|t| t.label == label)
    }

    pub fn is_registered_type(&self, label: &str) -> bool {
        self.element_type(label).is_some()
    }

    pub fn relation(&self, label: &str) -> Option<&RelationType> {
        let canonical = self.canonical_relation(label);
        self.relations.iter().find(|r| r.label == canonical)
    }

    /// Resolves aliases; unknown labels pass through unchanged.
    pub fn canonical_relation<'a>(&'a self, label: &'a str) -> &'a str {
        self.aliases.get(label).map(String::as_str).unwrap_or(label)
    }
}

/// Total mapping from complete S-E-C triples to ASIL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskTable {
    entries: [AsilValue; RiskTable::LEN],
}

impl RiskTable {
    pub const LEN: usize = 4 * 5 * 4;

    fn index(s: u8, e: u8, c: u8) -> usize {
        usize::from(s) * 20 + usize::from(e) * 4 + usize::from(c)
    }

    /// Every complete triple in (s, e, c) lexicographic order.
    pub fn complete_triples() -> impl Iterator<Item = SecTriple> {
        Severity::LEVELS.iter().flat_map(|&s| {
            Exposure::LEVELS
                .iter()
                .flat_map(move |&e| Controllability::LEVELS.iter().map(move |&c| SecTriple::new(s, e, c)))
        })
    }

    pub fn key(triple: &SecTriple) -> Option<String> {
        let (s, e, c) = triple.levels()?;
        Some(format!("S{s}E{e}C{c}"))
    }

    pub fn get(&self, triple: &SecTriple) -> Option<AsilValue> {
        let (s, e, c) = triple.levels()?;
        Some(self.entries[Self::index(s, e, c)])
    }

    /// Builds a table from `S{s}E{e}C{c}` keys. All 80 complete triples must be present.
    pub fn from_entries(entries: &BTreeMap<String, String>) -> Result<RiskTable, ModelError> {
        let mut slots: [Option<AsilValue>; Self::LEN] = [None; Self::LEN];
        for (key, value) in entries {
            let triple = parse_risk_key(key).ok_or_else(|| ModelError::UnknownRiskKey(key.clone()))?;
            let asil = parse_asil(value)?;
            if !asil.is_assigned() {
                return Err(ModelError::UnassignedRiskEntry { key: key.clone() });
            }
            let (s, e, c) = triple.levels().expect("parsed keys are complete");
            slots[Self::index(s, e, c)] = Some(asil);
        }
        let mut table = [AsilValue::Unassigned; Self::LEN];
        for triple in Self::complete_triples() {
            let (s, e, c) = triple.levels().expect("complete");
            let i = Self::index(s, e, c);
            table[i] = slots[i].ok_or_else(|| ModelError::MissingRiskEntry(Self::key(&triple).expect("complete")))?;
        }
        Ok(RiskTable { entries: table })
    }

    /// Parses a JSON object document mapping `S{s}E{e}C{c}` to ASIL tokens.
    pub fn from_json_str(doc: &str) -> Result<RiskTable, ModelError> {
        let map: BTreeMap<String, String> =
            serde_json::from_str(doc).map_err(|e| ModelError::RiskDocument(e.to_string()))?;
        Self::from_entries(&map)
    }

    pub fn to_entries(&self) -> BTreeMap<String, String> {
        Self::complete_triples()
            .map(|t| {
                (
                    Self::key(&t).expect("complete"),
                    self.get(&t).expect("complete").as_str().to_string(),
                )
            })
            .collect()
    }
}

impl Default for RiskTable {
    /// Additive shorthand: any zero component gives QM, otherwise the level sum
    /// 10/9/8/7 maps to D/C/B/A and anything lower to QM.
    fn default() -> Self {
        let mut entries = [AsilValue::Unassigned; Self::LEN];
        for triple in Self::complete_triples() {
            let (s, e, c) = triple.levels().expect("complete");
            let asil = if s == 0 || e == 0 || c == 0 {
                AsilValue::Qm
            } else {
                match s + e + c {
                    10 => AsilValue::D,
                    9 => AsilValue::C,
                    8 => AsilValue::B,
                    7 => AsilValue::A,
                    _ => AsilValue::Qm,
                }
            };
            entries[Self::index(s, e, c)] = asil;
        }
        RiskTable { entries }
    }
}

fn parse_risk_key(key: &str) -> Option<SecTriple> {
    let rest = key.strip_prefix('S')?;
    let (s, rest) = rest.split_once('E')?;
    let (e, c) = rest.split_once('C')?;
    let triple = SecTriple::new(
        Severity::from_level(s.parse().ok()?)?,
        Exposure::from_level(e.parse().ok()?)?,
        Controllability::from_level(c.parse().ok()?)?,
    );
    Some(triple)
}

pub fn asil_from_sec(triple: &SecTriple, table: &RiskTable) -> Result<AsilValue, ModelError> {
    table.get(triple).ok_or(ModelError::IncompleteSec)
}
