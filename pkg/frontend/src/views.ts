import type { BrowseView, CatalogRecord, OwnService } from './types.js';
import type { RegistrationForm } from './api.js';
import type { FieldError, ServiceDraft } from './validate.js';
import type { Route } from './router.js';
import { formatHash } from './router.js';

// All rendering is string in, string out. Views receive only what they
// display; the session token in particular never reaches this module.

export interface ViewState {
  route: Route;
  providerName: string | null;
  catalog: BrowseView | null;
  own: OwnService[];
  draft: ServiceDraft;
  draftErrors: FieldError[];
  editing: string | null;
  registerForm: RegistrationForm;
  registerErrors: FieldError[];
  loginError: string | null;
  flash: string | null;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

const esc = escapeHtml;

function fieldError(errors: FieldError[], field: string): string {
  const hit = errors.find((e) => e.field === field);
  return hit ? `<span class="field-error">${esc(hit.message)}</span>` : '';
}

function input(
  name: string,
  label: string,
  value: string,
  errors: FieldError[],
  type = 'text',
): string {
  return `<label>${esc(label)}
    <input type="${type}" name="${name}" value="${esc(value)}">
    ${fieldError(errors, name)}
  </label>`;
}

function navigation(state: ViewState): string {
  const account = state.providerName
    ? `<span class="who">${esc(state.providerName)}</span>
       <a href="${formatHash({ view: 'manage' })}">manage services</a>
       <button type="button" data-action="logout">log out</button>`
    : `<a href="${formatHash({ view: 'login' })}">log in</a>
       <a href="${formatHash({ view: 'register' })}">register</a>`;
  return `<nav>
    <a class="brand" href="#/">grid market directory</a>
    <span class="account">${account}</span>
  </nav>`;
}

function typeNav(catalog: BrowseView | null, active: string | null): string {
  const types = catalog?.types ?? [];
  if (types.length === 0) return '';
  const items = types
    .map((t) => {
      const mark = t === active ? ' class="active"' : '';
      return `<li${mark}><a href="${formatHash({ view: 'type', type: t })}">${esc(t)}</a></li>`;
    })
    .join('');
  return `<ul class="type-nav"><li><a href="#/">all</a></li>${items}</ul>`;
}

function recordRows(services: CatalogRecord[]): string {
  return services
    .map(
      (s) => `<tr>
      <td>${esc(s.name)}</td>
      <td>${s.provider ? `<a href="${formatHash({ view: 'provider', provider: s.provider })}">${esc(s.provider)}</a>` : ''}</td>
      <td class="num">${esc(s.price?.hardware ?? '')}</td>
      <td class="num">${esc(s.price?.software ?? '')}</td>
      <td>${esc(s.address)}</td>
    </tr>`,
    )
    .join('');
}

function catalogTable(services: CatalogRecord[]): string {
  return `<table class="services">
    <thead><tr><th>name</th><th>provider</th><th>hardware price</th><th>software price</th><th>host</th></tr></thead>
    <tbody>${recordRows(services)}</tbody>
  </table>`;
}

function catalogView(state: ViewState, emptyMessage: string): string {
  const catalog = state.catalog;
  if (!catalog || catalog.groups.length === 0) {
    return `<p class="empty">${esc(emptyMessage)}</p>`;
  }
  return catalog.groups
    .map(
      (g) => `<section class="type-group">
      <h2><a href="${formatHash({ view: 'type', type: g.type })}">${esc(g.type)}</a></h2>
      ${catalogTable(g.services)}
    </section>`,
    )
    .join('');
}

function loginView(state: ViewState): string {
  const failure = state.loginError
    ? `<p class="form-error">${esc(state.loginError)}</p>`
    : '';
  return `<section class="card">
    <h1>log in</h1>
    ${failure}
    <form id="login-form">
      ${input('login_name', 'login name', '', [])}
      ${input('password', 'password', '', [], 'password')}
      <button type="submit">log in</button>
    </form>
    <p>no account yet? <a href="${formatHash({ view: 'register' })}">register</a></p>
  </section>`;
}

function registerView(state: ViewState): string {
  const form = state.registerForm;
  const errors = state.registerErrors;
  return `<section class="card">
    <h1>register as a provider</h1>
    <form id="register-form">
      ${input('provider_name', 'organisation name', form.provider_name, errors)}
      ${input('login_name', 'login name', form.login_name, errors)}
      ${input('password', 'password', '', errors, 'password')}
      ${input('contact_address', 'contact address', form.contact_address, errors)}
      ${input('extra_info', 'additional information', form.extra_info, errors)}
      <button type="submit">register</button>
    </form>
  </section>`;
}

function ownRows(services: OwnService[]): string {
  return services
    .map(
      (s) => `<tr>
      <td>${esc(s.service_name)}</td>
      <td>${esc(s.service_type)}</td>
      <td>${esc(s.host_name)}</td>
      <td class="num">${esc(s.price.hardware)}</td>
      <td class="num">${esc(s.price.software)}</td>
      <td>
        <button type="button" data-action="edit" data-name="${esc(s.service_name)}">edit</button>
        <button type="button" data-action="delete" data-name="${esc(s.service_name)}">delete</button>
      </td>
    </tr>`,
    )
    .join('');
}

function manageView(state: ViewState): string {
  const heading = state.editing === null ? 'add a service' : `edit ${state.editing}`;
  const listing =
    state.own.length === 0
      ? '<p class="empty">you have no services yet</p>'
      : `<table class="services">
      <thead><tr><th>name</th><th>type</th><th>host</th><th>hardware price</th><th>software price</th><th></th></tr></thead>
      <tbody>${ownRows(state.own)}</tbody>
    </table>`;
  const d = state.draft;
  const errors = state.draftErrors;
  const nameField =
    state.editing === null
      ? input('service_name', 'service name', d.service_name, errors)
      : `<label>service name
      <input type="text" name="service_name" value="${esc(d.service_name)}" readonly>
    </label>`;
  return `<section>
    <h1>services of ${esc(state.providerName ?? '')}</h1>
    ${listing}
    <section class="card">
      <h2>${esc(heading)}</h2>
      <form id="service-form">
        ${nameField}
        ${input('service_type', 'service type', d.service_type, errors)}
        ${input('host_name', 'host name', d.host_name, errors)}
        ${input('application_path', 'application path', d.application_path, errors)}
        ${input('hardware', 'hardware price (per CPU-second)', d.hardware, errors)}
        ${input('software', 'software price (per application operation)', d.software, errors)}
        ${input('description', 'description', d.description, errors)}
        <button type="submit">${state.editing === null ? 'add service' : 'save changes'}</button>
        ${state.editing === null ? '' : '<button type="button" data-action="cancel-edit">cancel</button>'}
      </form>
    </section>
  </section>`;
}

function mainView(state: ViewState): string {
  switch (state.route.view) {
    case 'catalog':
      return typeNav(state.catalog, null) + catalogView(state, 'no services are registered yet');
    case 'type':
      return (
        typeNav(state.catalog, state.route.type) +
        catalogView(state, `no services of type ${state.route.type}`)
      );
    case 'provider':
      return (
        `<h1>services of ${esc(state.route.provider)}</h1>` +
        catalogView(state, `no services from ${state.route.provider}`)
      );
    case 'login':
      return loginView(state);
    case 'register':
      return registerView(state);
    case 'manage':
      return manageView(state);
  }
}

export function renderApp(state: ViewState): string {
  const flash = state.flash ? `<p class="flash">${esc(state.flash)}</p>` : '';
  return `${navigation(state)}${flash}<main>${mainView(state)}</main>`;
}
