//! C ABI over `editmine`.
//!
//! Every function returns an [`EmStatus`] and writes results through out
//! pointers. Objects are opaque handles freed with their `_free` function;
//! strings returned to the caller are freed with [`em_string_free`]. On
//! failure, [`em_last_error_message`] describes the error of the last call
//! on the same thread. No function unwinds into the caller.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use editmine::ast::{parse_tree, Tree};
use editmine::catalog::{
    aggregate, export_catalog, filter_catalog, import_catalog, render_rules, PatternCatalog,
};
use editmine::cluster::ClusterConfig;
use editmine::ingest::{mine, MineConfig, PairsDir, Parsers, RevisionSource};
use editmine::pattern::apply_pattern;

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    IoError = 4,
    /// The rule does not match the tree.
    NoMatch = 5,
    OutOfRange = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// A parsed tree.
pub struct EmTree(Tree);

/// A pattern catalog.
pub struct EmCatalog(PatternCatalog);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

type Failure = (EmStatus, String);

fn set_error(message: Option<String>) {
    let message = message.map(|m| CString::new(m.replace('\0', " ")).expect("no interior NUL"));
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

/// Run `body`, recording its error and converting panics.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> EmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(None);
            EmStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(Some(message));
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| (*s).to_owned()))
                .unwrap_or_else(|| "panic".to_owned());
            set_error(Some(format!("internal error: {message}")));
            EmStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| (EmStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| (EmStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err((EmStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (EmStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|e| {
        (
            EmStatus::InvalidUtf8,
            format!("result holds a NUL byte: {e}"),
        )
    })
}

fn handle<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Parse an s-expression tree.
///
/// # Safety
/// `source` must be a NUL-terminated string and `tree_out` writable.
#[no_mangle]
pub unsafe extern "C" fn em_tree_parse(
    source: *const c_char,
    tree_out: *mut *mut EmTree,
) -> EmStatus {
    guard(|| {
        let slot = out(tree_out, "tree_out")?;
        *slot = ptr::null_mut();
        let tree = parse_tree(text(source, "source")?)
            .map_err(|e| (EmStatus::ParseError, e.to_string()))?;
        *slot = handle(EmTree(tree));
        Ok(())
    })
}

/// # Safety
/// `tree` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn em_tree_free(tree: *mut EmTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Render a tree back to s-expression text.
///
/// # Safety
/// `tree` must be a live handle and `text_out` writable.
#[no_mangle]
pub unsafe extern "C" fn em_tree_to_string(
    tree: *const EmTree,
    text_out: *mut *mut c_char,
) -> EmStatus {
    guard(|| {
        let slot = out(text_out, "text_out")?;
        *slot = ptr::null_mut();
        *slot = c_string(borrow(tree, "tree")?.0.to_string())?;
        Ok(())
    })
}

/// Number of leaves of a tree.
///
/// # Safety
/// `tree` must be a live handle and `size_out` writable.
#[no_mangle]
pub unsafe extern "C" fn em_tree_size(tree: *const EmTree, size_out: *mut usize) -> EmStatus {
    guard(|| {
        *out(size_out, "size_out")? = borrow(tree, "tree")?.0.size();
        Ok(())
    })
}

/// Read a catalog from its line-delimited text form.
///
/// # Safety
/// `source` must be a NUL-terminated string and `catalog_out` writable.
#[no_mangle]
pub unsafe extern "C" fn em_catalog_import(
    source: *const c_char,
    catalog_out: *mut *mut EmCatalog,
) -> EmStatus {
    guard(|| {
        let slot = out(catalog_out, "catalog_out")?;
        *slot = ptr::null_mut();
        let catalog = import_catalog(text(source, "source")?)
            .map_err(|e| (EmStatus::ParseError, e.to_string()))?;
        *slot = handle(EmCatalog(catalog));
        Ok(())
    })
}

/// # Safety
/// `catalog` must come from this library and not be used afterwards. Null
/// is ignored.
#[no_mangle]
pub unsafe extern "C" fn em_catalog_free(catalog: *mut EmCatalog) {
    if !catalog.is_null() {
        drop(Box::from_raw(catalog));
    }
}

/// Number of rules in a catalog.
///
/// # Safety
/// `catalog` must be a live handle and `len_out` writable.
#[no_mangle]
pub unsafe extern "C" fn em_catalog_len(
    catalog: *const EmCatalog,
    len_out: *mut usize,
) -> EmStatus {
    guard(|| {
        *out(len_out, "len_out")? = borrow(catalog, "catalog")?.0.len();
        Ok(())
    })
}

/// Human-readable rule listing.
///
/// # Safety
/// `catalog` must be a live handle and `text_out` writable.
#[no_mangle]
pub unsafe extern "C" fn em_catalog_render(
    catalog: *const EmCatalog,
    text_out: *mut *mut c_char,
) -> EmStatus {
    guard(|| {
        let slot = out(text_out, "text_out")?;
        *slot = ptr::null_mut();
        *slot = c_string(render_rules(&borrow(catalog, "catalog")?.0))?;
        Ok(())
    })
}

/// Line-delimited text form, readable by [`em_catalog_import`].
///
/// # Safety
/// `catalog` must be a live handle and `text_out` writable.
#[no_mangle]
pub unsafe extern "C" fn em_catalog_export(
    catalog: *const EmCatalog,
    text_out: *mut *mut c_char,
) -> EmStatus {
    guard(|| {
        let slot = out(text_out, "text_out")?;
        *slot = ptr::null_mut();
        *slot = c_string(export_catalog(&borrow(catalog, "catalog")?.0))?;
        Ok(())
    })
}

/// Rewrite `tree` with rule `index` (0-based). Returns `NoMatch` when the
/// rule's before template does not match the whole tree.
///
/// # Safety
/// `catalog` and `tree` must be live handles and `tree_out` writable.
#[no_mangle]
pub unsafe extern "C" fn em_catalog_apply(
    catalog: *const EmCatalog,
    index: usize,
    tree: *const EmTree,
    tree_out: *mut *mut EmTree,
) -> EmStatus {
    guard(|| {
        let slot = out(tree_out, "tree_out")?;
        *slot = ptr::null_mut();
        let catalog = &borrow(catalog, "catalog")?.0;
        let tree = &borrow(tree, "tree")?.0;
        let entry = catalog.entries.get(index).ok_or_else(|| {
            (
                EmStatus::OutOfRange,
                format!("rule {index} of {}", catalog.len()),
            )
        })?;
        let rewritten = apply_pattern(&entry.pattern, tree)
            .ok_or_else(|| (EmStatus::NoMatch, format!("rule {index} does not match")))?;
        *slot = handle(EmTree(rewritten));
        Ok(())
    })
}

/// A new catalog keeping rules seen in at least `min_projects` projects and
/// `min_edits` edits; `drop_spurious` also drops renames and rules that fire
/// on anything.
///
/// # Safety
/// `catalog` must be a live handle and `catalog_out` writable.
#[no_mangle]
pub unsafe extern "C" fn em_catalog_filter(
    catalog: *const EmCatalog,
    min_projects: usize,
    min_edits: usize,
    drop_spurious: bool,
    catalog_out: *mut *mut EmCatalog,
) -> EmStatus {
    guard(|| {
        let slot = out(catalog_out, "catalog_out")?;
        *slot = ptr::null_mut();
        let filtered = filter_catalog(
            &borrow(catalog, "catalog")?.0,
            min_projects,
            min_edits,
            drop_spurious,
        );
        *slot = handle(EmCatalog(filtered));
        Ok(())
    })
}

/// Mine pairs directories (one project each) into an unfiltered catalog.
///
/// # Safety
/// `dirs` must point to `count` NUL-terminated strings and `catalog_out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn em_mine_pairs(
    dirs: *const *const c_char,
    count: usize,
    dcap_depth: usize,
    catalog_out: *mut *mut EmCatalog,
) -> EmStatus {
    guard(|| {
        let slot = out(catalog_out, "catalog_out")?;
        *slot = ptr::null_mut();
        if dirs.is_null() && count > 0 {
            return Err((EmStatus::NullPointer, "dirs is null".to_owned()));
        }
        if dcap_depth == 0 {
            return Err((
                EmStatus::OutOfRange,
                "dcap_depth must be at least 1".to_owned(),
            ));
        }
        let mut sources: Vec<Box<dyn RevisionSource>> = Vec::with_capacity(count);
        for k in 0..count {
            let dir = text(*dirs.add(k), &format!("dirs[{k}]"))?;
            sources.push(Box::new(PairsDir::new(dir)));
        }
        let config = MineConfig {
            cluster: ClusterConfig {
                depth: dcap_depth,
                ..ClusterConfig::default()
            },
            ..MineConfig::default()
        };
        let clusters = mine(&sources, &Parsers::default(), &config)
            .map_err(|e| (EmStatus::IoError, e.to_string()))?;
        *slot = handle(EmCatalog(aggregate(&clusters, dcap_depth)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn em_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null after a
/// successful call. Valid until the next call on the same thread; do not
/// free.
#[no_mangle]
pub extern "C" fn em_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}
