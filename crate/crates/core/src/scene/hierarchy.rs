//! Class hierarchy: `extends` edges between classes plus `implements` edges
//! from classes (and extending interfaces) to interfaces.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::ClassSignature;

#[derive(Debug, Clone, Default)]
pub struct Hierarchy {
    parent: BTreeMap<ClassSignature, ClassSignature>,
    children: BTreeMap<ClassSignature, Vec<ClassSignature>>,
    interfaces: BTreeMap<ClassSignature, Vec<ClassSignature>>,
    implementors: BTreeMap<ClassSignature, Vec<ClassSignature>>,
    /// Classes whose superclass name did not resolve, with that name.
    unresolved: BTreeMap<ClassSignature, String>,
    roots: Vec<ClassSignature>,
}

/// One class as seen by the hierarchy builder.
#[derive(Debug, Clone)]
pub struct HierarchyInput {
    pub class: ClassSignature,
    /// Resolved superclass, or the unresolved name.
    pub extends: Option<Result<ClassSignature, String>>,
    pub implements: Vec<ClassSignature>,
}

impl Hierarchy {
    /// Builds the relation; an `extends` cycle is returned as the list of
    /// classes on it.
    pub fn build(inputs: &[HierarchyInput]) -> Result<Hierarchy, Vec<ClassSignature>> {
        let mut h = Hierarchy::default();
        for i in inputs {
            match &i.extends {
                Some(Ok(p)) => {
                    h.parent.insert(i.class.clone(), p.clone());
                    h.children.entry(p.clone()).or_default().push(i.class.clone());
                }
                Some(Err(name)) => {
                    h.unresolved.insert(i.class.clone(), name.clone());
                }
                None => {}
            }
            for itf in &i.implements {
                h.interfaces.entry(i.class.clone()).or_default().push(itf.clone());
                h.implementors.entry(itf.clone()).or_default().push(i.class.clone());
            }
        }
        for v in h.children.values_mut().chain(h.implementors.values_mut()) {
            v.sort();
            v.dedup();
        }
        for i in inputs {
            let mut seen = vec![i.class.clone()];
            let mut cur = &i.class;
            while let Some(p) = h.parent.get(cur) {
                if let Some(pos) = seen.iter().position(|s| s == p) {
                    let mut cycle = seen.split_off(pos);
                    cycle.sort();
                    return Err(cycle);
                }
                seen.push(p.clone());
                cur = p;
            }
        }
        h.roots = inputs.iter().filter(|i| !h.parent.contains_key(&i.class)).map(|i| i.class.clone()).collect();
        h.roots.sort();
        Ok(h)
    }

    pub fn super_class(&self, c: &ClassSignature) -> Option<&ClassSignature> {
        self.parent.get(c)
    }

    pub fn children(&self, c: &ClassSignature) -> &[ClassSignature] {
        self.children.get(c).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn interfaces(&self, c: &ClassSignature) -> &[ClassSignature] {
        self.interfaces.get(c).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Classes with no resolved superclass, sorted.
    pub fn roots(&self) -> &[ClassSignature] {
        &self.roots
    }

    /// Unresolved superclass name of a root, if it had one.
    pub fn unresolved_super(&self, c: &ClassSignature) -> Option<&str> {
        self.unresolved.get(c).map(String::as_str)
    }

    /// `c` followed by its superclasses, nearest first.
    pub fn ancestors(&self, c: &ClassSignature) -> Vec<ClassSignature> {
        let mut out = vec![c.clone()];
        let mut cur = c;
        while let Some(p) = self.parent.get(cur) {
            out.push(p.clone());
            cur = p;
        }
        out
    }

    /// `c` and every class or interface that extends or implements it,
    /// directly or transitively. Sorted.
    pub fn subtypes(&self, c: &ClassSignature) -> Vec<ClassSignature> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([c.clone()]);
        while let Some(x) = queue.pop_front() {
            if !seen.insert(x.clone()) {
                continue;
            }
            for n in self.children(&x).iter().chain(self.implementors.get(&x).into_iter().flatten()) {
                queue.push_back(n.clone());
            }
        }
        seen.into_iter().collect()
    }

    /// True when `sub` is `sup` or one of its subtypes.
    pub fn is_subtype(&self, sub: &ClassSignature, sup: &ClassSignature) -> bool {
        let mut queue = VecDeque::from([sub.clone()]);
        let mut seen = BTreeSet::new();
        while let Some(x) = queue.pop_front() {
            if &x == sup {
                return true;
            }
            if !seen.insert(x.clone()) {
                continue;
            }
            queue.extend(self.parent.get(&x).cloned());
            queue.extend(self.interfaces(&x).iter().cloned());
        }
        false
    }

    /// Parent to direct children over `extends` edges.
    pub fn edges(&self) -> impl Iterator<Item = (&ClassSignature, &ClassSignature)> {
        self.children.iter().flat_map(|(p, cs)| cs.iter().map(move |c| (p, c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: &str) -> ClassSignature {
        ClassSignature::new("a.ets", vec![], n)
    }

    fn input(n: &str, sup: Option<&str>) -> HierarchyInput {
        HierarchyInput { class: c(n), extends: sup.map(|s| Ok(c(s))), implements: vec![] }
    }

    #[test]
    fn animal_tree() {
        let h = Hierarchy::build(&[
            input("Animal", None),
            input("Dog", Some("Animal")),
            input("Cat", Some("Animal")),
            input("Cow", Some("Animal")),
        ])
        .unwrap();
        assert_eq!(h.children(&c("Animal")), &[c("Cat"), c("Cow"), c("Dog")]);
        assert_eq!(h.roots(), &[c("Animal")]);
        assert_eq!(h.subtypes(&c("Animal")).len(), 4);
        assert_eq!(h.ancestors(&c("Dog")), vec![c("Dog"), c("Animal")]);
    }

    #[test]
    fn single_class_is_root() {
        let h = Hierarchy::build(&[input("A", None)]).unwrap();
        assert_eq!(h.roots(), &[c("A")]);
        assert_eq!(h.edges().count(), 0);
    }

    #[test]
    fn cycle_is_reported() {
        let err = Hierarchy::build(&[input("A", Some("B")), input("B", Some("A"))]).unwrap_err();
        assert_eq!(err, vec![c("A"), c("B")]);
    }

    #[test]
    fn unresolved_super_is_flagged_root() {
        let i = HierarchyInput { class: c("A"), extends: Some(Err("Base".into())), implements: vec![] };
        let h = Hierarchy::build(&[i]).unwrap();
        assert_eq!(h.roots(), &[c("A")]);
        assert_eq!(h.unresolved_super(&c("A")), Some("Base"));
    }

    #[test]
    fn interfaces_reach_implementors() {
        let mut a = input("A", None);
        a.implements = vec![c("I")];
        let h = Hierarchy::build(&[input("I", None), a, input("B", Some("A"))]).unwrap();
        assert_eq!(h.subtypes(&c("I")), vec![c("A"), c("B"), c("I")]);
        assert!(h.is_subtype(&c("B"), &c("I")));
        assert!(!h.is_subtype(&c("I"), &c("B")));
    }
}
