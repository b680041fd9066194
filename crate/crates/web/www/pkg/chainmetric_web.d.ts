/* tslint:disable */
/* eslint-disable */

/**
 * `d_ε(p, q)` across the slit, with and without the crossing rule.
 */
export function slitChains(h: number, eps: number): string;

/**
 * `d_ε(p, q)` on the spider with `K` spines at spacing `h`.
 */
export function spiderChain(k: number, h: number, eps: number): string;

/**
 * Waypoints every `δ` along a minimizing chain from `p` to `q` on the spider.
 */
export function spiderWaypoints(k: number, h: number, eps: number, delta: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly slitChains: (a: number, b: number) => [number, number, number, number];
    readonly spiderChain: (a: number, b: number, c: number) => [number, number, number, number];
    readonly spiderWaypoints: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
