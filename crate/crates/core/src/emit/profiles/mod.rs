//! Class-skeleton profiles.
//!
//! A profile turns one [`ClassDef`] into source text for a target language.
//! Profiles are looked up by name in a [`ProfileRegistry`]; adding a target
//! means implementing [`ClassProfile`] and registering it.

mod csharp;
mod generic;
mod java;

use std::collections::BTreeMap;

pub use csharp::CSharpLike;
pub use generic::Generic;
pub use java::JavaLike;

use super::EmitError;
use crate::convert::ClassDef;

pub trait ClassProfile: Send + Sync {
    /// Registry key, e.g. `java-like`.
    fn name(&self) -> &str;

    /// File extension without the dot.
    fn extension(&self) -> &str;

    fn render(&self, class: &ClassDef) -> Result<String, EmitError>;
}

#[derive(Default)]
pub struct ProfileRegistry {
    profiles: BTreeMap<String, Box<dyn ClassProfile>>,
}

impl ProfileRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `java-like`, `csharp-like` and `generic`.
    pub fn with_builtin() -> Self {
        let mut registry = Self::new();
        registry.register(Box::new(JavaLike));
        registry.register(Box::new(CSharpLike));
        registry.register(Box::new(Generic));
        registry
    }

    /// Adds `profile`, replacing any profile of the same name.
    pub fn register(&mut self, profile: Box<dyn ClassProfile>) {
        self.profiles.insert(profile.name().to_string(), profile);
    }

    pub fn get(&self, name: &str) -> Option<&dyn ClassProfile> {
        self.profiles.get(name).map(|p| p.as_ref())
    }

    pub fn names(&self) -> Vec<&str> {
        self.profiles.keys().map(String::as_str).collect()
    }

    /// Like [`get`](Self::get), with an error listing the registered names.
    pub fn require(&self, name: &str) -> Result<&dyn ClassProfile, EmitError> {
        self.get(name)
            .ok_or_else(|| EmitError::UnknownProfile { name: name.to_string(), available: self.names().join(", ") })
    }
}

pub(crate) fn code_type<'a>(class: &ClassDef, member: &str, ty: Option<&'a str>) -> Result<&'a str, EmitError> {
    ty.ok_or_else(|| EmitError::MissingCodeType { owner: class.name.clone(), member: member.to_string() })
}
