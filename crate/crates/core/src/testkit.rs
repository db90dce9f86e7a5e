pub(crate) use crate::gen::fixtures::{line, line3};
