//! Scene files: a field, exactly one task block and optional output options.

use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use skeleta::valfield::FieldSpec;
use skeleta::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Skeleton,
    Retract,
    Newton,
    Trop,
    Flow,
    Family,
}

impl Task {
    pub const ALL: [Task; 6] = [Task::Skeleton, Task::Retract, Task::Newton, Task::Trop, Task::Flow, Task::Family];

    pub fn name(self) -> &'static str {
        match self {
            Task::Skeleton => "skeleton",
            Task::Retract => "retract",
            Task::Newton => "newton",
            Task::Trop => "trop",
            Task::Flow => "flow",
            Task::Family => "family",
        }
    }

    fn needs_field(self) -> bool {
        self != Task::Flow
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default)]
pub struct OutputOptions {
    pub format: Option<String>,
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct Scene {
    pub field: Option<FieldSpec>,
    pub task: Task,
    pub block: Map<String, Value>,
    pub output: OutputOptions,
}

impl Scene {
    pub fn load(path: &Path, expected: Task) -> Result<Scene> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::malformed(format!("cannot read scene {}: {e}", path.display())))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| Error::malformed(format!("scene is not JSON: {e}")))?;
        Scene::from_value(value, expected)
    }

    pub fn from_value(value: Value, expected: Task) -> Result<Scene> {
        let Value::Object(mut top) = value else {
            return Err(Error::malformed("scene must be a JSON object"));
        };
        let field = match top.remove("field") {
            Some(v) => {
                let spec: FieldSpec = serde_json::from_value(v).map_err(|e| Error::malformed(format!("field: {e}")))?;
                spec.validate()?;
                Some(spec)
            }
            None => None,
        };
        let output = match top.remove("output") {
            None => OutputOptions::default(),
            Some(Value::Object(o)) => OutputOptions {
                format: o.get("format").and_then(Value::as_str).map(str::to_string),
                path: o.get("path").and_then(Value::as_str).map(PathBuf::from),
            },
            Some(_) => return Err(Error::malformed("output must be an object")),
        };
        let mut tasks: Vec<(Task, Value)> = Vec::new();
        for (key, v) in top {
            let task = Task::ALL
                .into_iter()
                .find(|t| t.name() == key)
                .ok_or_else(|| Error::malformed(format!("unknown scene key {key}")))?;
            tasks.push((task, v));
        }
        let [(task, block)] = <[(Task, Value); 1]>::try_from(tasks)
            .map_err(|_| Error::malformed("scene needs exactly one task block"))?;
        if task != expected {
            return Err(Error::malformed(format!("scene holds a {task} task, not {expected}")));
        }
        let Value::Object(block) = block else {
            return Err(Error::malformed(format!("{task} block must be an object")));
        };
        if task.needs_field() && field.is_none() {
            return Err(Error::malformed("scene needs a field"));
        }
        Ok(Scene { field, task, block, output })
    }

    pub fn get(&self, key: &str) -> Result<&Value> {
        self.block.get(key).ok_or_else(|| Error::malformed(format!("{} block lacks {key}", self.task)))
    }
}
