import { ApiError } from './api.js';
import type { RegistrationForm, RegistryApi, ServicePayload } from './api.js';
import { PortalSession } from './session.js';
import { CATALOG, guardRoute, parseHash } from './router.js';
import type { Route } from './router.js';
import {
  EMPTY_DRAFT,
  draftToPayload,
  validateRegistration,
  validateServiceDraft,
  violationErrors,
} from './validate.js';
import type { FieldError, ServiceDraft } from './validate.js';
import { renderApp } from './views.js';
import type { ViewState } from './views.js';
import type { BrowseView, OwnService } from './types.js';

const EMPTY_REGISTRATION: RegistrationForm = {
  provider_name: '',
  login_name: '',
  password: '',
  contact_address: '',
  extra_info: '',
};

export interface AppDeps {
  api: RegistryApi;
  session: PortalSession;
  /** Called with the full page HTML after every state change. */
  present(html: string): void;
}

/** The portal's state machine. Owns everything the page shows and talks
 * to the server for every fact; the DOM layer only forwards events. */
export class PortalApp {
  private route: Route = CATALOG;
  private catalog: BrowseView | null = null;
  private own: OwnService[] = [];
  private draft: ServiceDraft = { ...EMPTY_DRAFT };
  private draftErrors: FieldError[] = [];
  private editing: string | null = null;
  private registerForm: RegistrationForm = { ...EMPTY_REGISTRATION };
  private registerErrors: FieldError[] = [];
  private loginError: string | null = null;
  private flash: string | null = null;

  constructor(private readonly deps: AppDeps) {}

  get currentRoute(): Route {
    return this.route;
  }

  viewState(): ViewState {
    return {
      route: this.route,
      providerName: this.deps.session.providerName,
      catalog: this.catalog,
      own: this.own,
      draft: this.draft,
      draftErrors: this.draftErrors,
      editing: this.editing,
      registerForm: this.registerForm,
      registerErrors: this.registerErrors,
      loginError: this.loginError,
      flash: this.flash,
    };
  }

  html(): string {
    return renderApp(this.viewState());
  }

  private present(): void {
    this.deps.present(this.html());
  }

  async start(hash: string): Promise<void> {
    await this.navigate(parseHash(hash));
  }

  async handleHashChange(hash: string): Promise<void> {
    await this.navigate(parseHash(hash));
  }

  async navigate(requested: Route): Promise<void> {
    const route = guardRoute(requested, this.deps.session.loggedIn);
    this.route = route;
    this.loginError = null;
    if (route.view !== 'manage') {
      this.draftErrors = [];
    }
    try {
      if (route.view === 'catalog') {
        this.catalog = await this.deps.api.browse();
      } else if (route.view === 'type') {
        this.catalog = await this.deps.api.browse({ type: route.type });
      } else if (route.view === 'provider') {
        this.catalog = await this.deps.api.browse({ provider: route.provider });
      } else if (route.view === 'manage') {
        await this.reloadOwn();
      }
    } catch (err) {
      if (this.handleAuthLoss(err)) return;
      throw err;
    }
    this.present();
    this.flash = null;
  }

  async submitLogin(loginName: string, password: string): Promise<void> {
    this.route = { view: 'login' }; // the form only exists on this view
    try {
      const result = await this.deps.api.login(loginName, password);
      this.deps.session.begin(result.token, result.provider_name);
    } catch (err) {
      if (err instanceof ApiError && err.status === 401) {
        // one generic message; the server does not say which field was wrong
        this.loginError = 'login failed';
        this.present();
        return;
      }
      throw err;
    }
    this.flash = `logged in as ${this.deps.session.providerName}`;
    await this.navigate({ view: 'manage' });
  }

  async submitRegistration(form: RegistrationForm): Promise<void> {
    this.route = { view: 'register' }; // the form only exists on this view
    this.registerForm = { ...form, password: '' };
    this.registerErrors = validateRegistration(form);
    if (this.registerErrors.length > 0) {
      this.present();
      return;
    }
    try {
      await this.deps.api.register(form);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        const field = err.code === 'duplicate_provider_name' ? 'provider_name' : 'login_name';
        this.registerErrors = [{ field, message: 'already taken' }];
        this.present();
        return;
      }
      if (err instanceof ApiError && err.status === 400) {
        this.registerErrors = violationErrors(err.violations);
        this.present();
        return;
      }
      throw err;
    }
    this.registerForm = { ...EMPTY_REGISTRATION };
    this.registerErrors = [];
    this.flash = 'account created, log in to manage services';
    await this.navigate({ view: 'login' });
  }

  async logout(): Promise<void> {
    const token = this.deps.session.token;
    if (token !== null) {
      try {
        await this.deps.api.logout(token);
      } catch {
        // the local session ends regardless
      }
    }
    this.deps.session.end();
    this.editing = null;
    this.draft = { ...EMPTY_DRAFT };
    this.flash = 'logged out';
    await this.navigate(CATALOG);
  }

  /** Validate locally first; nothing leaves the page while the form has
   * errors. Server-side rejections land on the same per-field display. */
  async submitService(draft: ServiceDraft): Promise<void> {
    this.draft = draft;
    this.draftErrors = validateServiceDraft(draft);
    if (this.draftErrors.length > 0) {
      this.present();
      return;
    }
    const token = this.deps.session.token;
    if (token === null) {
      await this.navigate({ view: 'login' });
      return;
    }
    const payload: ServicePayload = draftToPayload(draft);
    try {
      if (this.editing === null) {
        await this.deps.api.addService(token, payload);
      } else {
        await this.deps.api.updateService(token, payload);
      }
      await this.reloadOwn();
    } catch (err) {
      if (this.handleAuthLoss(err)) return;
      if (err instanceof ApiError && err.status === 400) {
        this.draftErrors = violationErrors(err.violations);
        this.present();
        return;
      }
      throw err;
    }
    this.flash = this.editing === null ? `added ${payload.service_name}` : `updated ${payload.service_name}`;
    this.editing = null;
    this.draft = { ...EMPTY_DRAFT };
    this.present();
    this.flash = null;
  }

  startEdit(serviceName: string): void {
    const service = this.own.find((s) => s.service_name === serviceName);
    if (!service) return;
    this.editing = serviceName;
    this.draft = {
      service_name: service.service_name,
      service_type: service.service_type,
      host_name: service.host_name,
      application_path: service.application_path,
      hardware: service.price.hardware,
      software: service.price.software,
      description: service.description,
    };
    this.draftErrors = [];
    this.present();
  }

  cancelEdit(): void {
    this.editing = null;
    this.draft = { ...EMPTY_DRAFT };
    this.draftErrors = [];
    this.present();
  }

  async deleteService(serviceName: string): Promise<void> {
    const token = this.deps.session.token;
    if (token === null) {
      await this.navigate({ view: 'login' });
      return;
    }
    try {
      await this.deps.api.removeService(token, serviceName);
      await this.reloadOwn();
    } catch (err) {
      if (this.handleAuthLoss(err)) return;
      throw err;
    }
    if (this.editing === serviceName) {
      this.editing = null;
      this.draft = { ...EMPTY_DRAFT };
    }
    this.present();
  }

  private async reloadOwn(): Promise<void> {
    const token = this.deps.session.token;
    if (token === null) throw new ApiError(401, 'unauthenticated', 'no session');
    this.own = await this.deps.api.myServices(token);
  }

  /** A 401 on any management call means the session died (expired or
   * revoked). Drop it and land on the login form. */
  private handleAuthLoss(err: unknown): boolean {
    if (err instanceof ApiError && err.status === 401) {
      this.deps.session.end();
      this.own = [];
      this.editing = null;
      this.route = { view: 'login' };
      this.loginError = 'session expired, log in again';
      this.present();
      return true;
    }
    return false;
  }
}
