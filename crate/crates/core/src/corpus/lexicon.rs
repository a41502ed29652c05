//! Word lists behind the synthetic generator.
//!
//! Every filler pool is split by parity: even positions serve seen types and
//! odd positions serve unseen types, so the two groups never share a filler.
//! Trigger lists are per type and pairwise disjoint.

use std::borrow::Cow;

pub(crate) const TRIGGERS: &[(&str, [&str; 6])] = &[
    ("Attack", ["bombed", "attacked", "fired", "shelled", "raided", "ambushed"]),
    ("Transport", ["traveled", "moved", "arrived", "shipped", "relocated", "departed"]),
    ("Die", ["died", "killed", "perished", "drowned", "slain", "succumbed"]),
    ("Meet", ["met", "convened", "gathered", "conferred", "huddled", "assembled"]),
    ("EndPosition", ["resigned", "retired", "quit", "dismissed", "ousted", "stepped"]),
    ("TransferMoney", ["paid", "donated", "funded", "lent", "financed", "remitted"]),
    ("Elect", ["elected", "voted", "reelected", "chosen", "installed", "balloted"]),
    ("Injure", ["injured", "wounded", "hurt", "maimed", "bruised", "scarred"]),
    ("PhoneWrite", ["phoned", "emailed", "wrote", "called", "texted", "messaged"]),
    ("TransferOwnership", ["sold", "bought", "acquired", "purchased", "auctioned", "traded"]),
    ("StartPosition", ["hired", "appointed", "recruited", "named", "promoted", "enlisted"]),
    ("ChargeIndict", ["charged", "indicted", "accused", "arraigned", "booked", "cited"]),
    ("TrialHearing", ["tried", "testified", "heard", "deliberated", "adjourned", "litigated"]),
    ("Sentence", ["sentenced", "condemned", "imprisoned", "punished", "penalized", "committed"]),
    ("ArrestJail", ["arrested", "detained", "apprehended", "captured", "jailed", "nabbed"]),
    ("BeBorn", ["born", "delivered", "birthed", "hatched", "christened", "baptized"]),
    ("Marry", ["married", "wed", "engaged", "betrothed", "espoused", "united"]),
    ("Divorce", ["divorced", "separated", "split", "annulled", "parted", "estranged"]),
    ("StartOrg", ["founded", "launched", "established", "incorporated", "created", "formed"]),
    ("EndOrg", ["dissolved", "closed", "shuttered", "liquidated", "disbanded", "folded"]),
    ("Demonstrate", ["protested", "marched", "rallied", "picketed", "demonstrated", "chanted"]),
    ("Sue", ["sued", "petitioned", "filed", "complained", "claimed", "challenged"]),
    ("Convict", ["convicted", "found", "adjudged", "pronounced", "determined", "ruled"]),
    ("Fine", ["fined", "levied", "assessed", "taxed", "docked", "surcharged"]),
    ("Execute", ["executed", "hanged", "beheaded", "electrocuted", "gassed", "shot"]),
    ("ReleaseParole", ["released", "paroled", "freed", "discharged", "liberated", "unshackled"]),
    ("MergeOrg", ["merged", "combined", "amalgamated", "consolidated", "joined", "fused"]),
    ("DeclareBankruptcy", ["bankrupted", "insolvent", "defaulted", "collapsed", "failed", "foundered"]),
    ("Nominate", ["nominated", "proposed", "tapped", "designated", "slated", "fielded"]),
    ("Extradite", ["extradited", "deported", "expelled", "repatriated", "handed", "transferred"]),
    ("Acquit", ["acquitted", "cleared", "exonerated", "absolved", "vindicated", "exculpated"]),
    ("Appeal", ["appealed", "contested", "disputed", "objected", "rebutted", "countered"]),
    ("Pardon", ["pardoned", "forgiven", "amnestied", "reprieved", "commuted", "spared"]),
];

/// Types that never belong to a task schema of their own: used to create
/// candidates with undefined event types.
pub(crate) const INVENTED_TYPES: &[&str] = &["Vote", "Protest", "Celebrate", "Negotiate", "Strike"];

/// Roles that no type defines, used for structural-mismatch candidates.
pub(crate) const STRAY_ROLES: &[&str] = &["entity", "time", "reason", "money", "topic", "crime", "position"];

pub(crate) const PREFIXES: &[&str] = &[
    "Reports said",
    "On Monday",
    "Officials confirmed that",
    "Witnesses said",
    "According to sources",
    "Late on Friday",
    "Earlier this week",
    "Local media reported that",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Category {
    Person,
    Group,
    Org,
    Place,
    Weapon,
    Vehicle,
    Artifact,
}

impl Category {
    pub fn of_role(role: &str) -> Category {
        match role {
            "person" | "victim" | "defendant" | "plaintiff" | "beneficiary" => Category::Person,
            "org" => Category::Org,
            "place" | "origin" | "destination" => Category::Place,
            "instrument" => Category::Weapon,
            "vehicle" => Category::Vehicle,
            "artifact" => Category::Artifact,
            _ => Category::Group,
        }
    }

    pub fn is_actor(self) -> bool {
        matches!(self, Category::Person | Category::Group | Category::Org)
    }

    /// Word placed before the filler when it is not the sentence subject.
    pub fn preposition(self) -> &'static str {
        match self {
            Category::Place => "in",
            Category::Weapon => "using",
            Category::Vehicle => "aboard",
            Category::Artifact => "involving",
            Category::Person | Category::Group | Category::Org => "with",
        }
    }

    fn pool(self) -> &'static [&'static str] {
        match self {
            Category::Person => &[
                "Ahmed Karimi", "Maria Lopez", "John Carter", "Li Wei", "Fatima Noor",
                "Peter Novak", "Anna Schmidt", "Omar Haddad", "Grace Kim", "Ivan Petrov",
                "Sara Cohen", "David Mensah", "Elena Rossi", "Tom Baker", "Yuki Tanaka",
                "Carlos Mendes", "Nadia Aziz", "Paul Dubois", "Ruth Ochieng", "Hassan Ali",
                "Mei Chen", "Victor Reyes", "Leila Farah", "Sam Okafor",
            ],
            Category::Group => &[
                "the militants", "the police", "the army", "the rebels", "the activists",
                "the council", "the ministry", "the union", "the coalition", "the delegation",
                "the troops", "the senate", "the committee", "the board", "the guerrillas",
                "the judges", "the regulators", "the insurgents", "the commission", "the federation",
                "the cabinet", "the brigade", "the tribunal", "the parliament",
            ],
            Category::Org => &[
                "Acme Corp", "Globex", "Initech", "Vandelay Industries", "Northwind",
                "Contoso", "Umbrella Holdings", "Stark Industries", "Wayne Enterprises", "Tyrell Systems",
                "Hooli", "Soylent Foods", "Cyberdyne", "Massive Dynamic", "Oceanic Airlines",
                "Blue Sun", "Aperture Labs", "Monarch Group", "Gringotts Bank", "Wonka Works",
                "Pied Piper", "Dunder Mifflin", "Sterling Cooper", "Prestige Worldwide",
            ],
            Category::Place => &[
                "Baghdad", "Derbyshire", "London", "Cairo", "Lagos", "Kabul", "Manila", "Lima",
                "Oslo", "Nairobi", "Karachi", "Bogota", "Jakarta", "Kyiv", "Dakar", "Quito",
                "Hanoi", "Tunis", "Accra", "Amman", "Beirut", "Seoul", "Madrid", "Sydney",
            ],
            Category::Weapon => &[
                "a car bomb", "rifles", "mortars", "a grenade", "artillery", "a knife",
                "missiles", "a drone", "machine guns", "explosives", "a truck bomb", "rockets",
                "a pistol", "tear gas", "a landmine", "sniper rifles", "air strikes", "a shotgun",
                "an IED", "cluster munitions", "a machete", "tank shells", "a crossbow", "incendiary devices",
            ],
            Category::Vehicle => &[
                "a convoy", "a helicopter", "a cargo ship", "a bus", "a train", "a ferry",
                "a jet", "an armored truck", "a boat", "a plane", "a van", "a motorcade",
                "a submarine", "a tanker", "a minibus", "a freighter", "a barge", "a limousine",
                "a tram", "a yacht", "a hovercraft", "a taxi", "a trawler", "a lorry",
            ],
            Category::Artifact => &[
                "the shares", "the documents", "the equipment", "the painting", "the weapons cache",
                "the land", "the aircraft", "the factory", "the grain", "the software",
                "the vehicles", "the oil", "the artwork", "the servers", "the jewels",
                "the property", "the medicine", "the satellite", "the ship", "the crops",
                "the manuscripts", "the gold", "the stadium", "the patents",
            ],
        }
    }

    /// Half of the pool reserved for one side of the seen/unseen split.
    pub fn fillers(self, seen: bool) -> Vec<&'static str> {
        let offset = usize::from(!seen);
        self.pool().iter().skip(offset).step_by(2).copied().collect()
    }
}

/// Trigger words for `type_name`. Types without a curated list get
/// deterministic pseudo-words derived from the name.
pub(crate) fn triggers(type_name: &str) -> Vec<Cow<'static, str>> {
    if let Some((_, words)) = TRIGGERS.iter().find(|(t, _)| *t == type_name) {
        return words.iter().map(|w| Cow::Borrowed(*w)).collect();
    }
    let stem = type_name.to_lowercase();
    ["ed", "ing", "ation", "ment", "al", "ance"]
        .iter()
        .map(|suffix| Cow::Owned(format!("{stem}{suffix}")))
        .collect()
}
